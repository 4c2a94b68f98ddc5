#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pomdpsr/alpha.hpp"
#include "pomdpsr/model.hpp"

namespace pomdpsr {

using Json = nlohmann::json;

/// A model file's contents; request_cost is present only when the file carries one.
struct ModelFile {
    PomdpModel model;
    std::optional<double> request_cost;

    /// Throws ModelError when the file has no request cost.
    PomdpSr as_pomdp_sr() const;
};

Json model_to_json(const PomdpModel& model, std::optional<double> request_cost = std::nullopt);
ModelFile model_from_json(const Json& j);

Json alpha_set_to_json(const AlphaVectorSet& set);
AlphaVectorSet alpha_set_from_json(const Json& j);

/// Beliefs as lists of [state, probability] pairs.
Json beliefs_to_json(const std::vector<Belief>& beliefs);
std::vector<Belief> beliefs_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

void save_model(const std::string& path, const PomdpModel& model, std::optional<double> request_cost = std::nullopt);
ModelFile load_model(const std::string& path);

}  // namespace pomdpsr
