#include "pomdpsr/io.hpp"

#include <fstream>
#include <sstream>

namespace pomdpsr {

PomdpSr ModelFile::as_pomdp_sr() const {
    if (!request_cost) throw ModelError("model file has no request_cost");
    return PomdpSr(model, *request_cost);
}

Json model_to_json(const PomdpModel& m, std::optional<double> request_cost) {
    Json j;
    j["num_states"] = m.num_states();
    j["num_actions"] = m.num_actions();
    j["num_observations"] = m.num_observations();
    j["discount"] = m.discount();
    if (request_cost) j["request_cost"] = *request_cost;

    Json trans = Json::array();
    Json obs = Json::array();
    Json rewards = Json::array();
    Json terminal = Json::array();
    for (StateId s = 0; s < m.num_states(); ++s) {
        for (ActionId a = 0; a < m.num_actions(); ++a) {
            for (const auto& t : m.transitions(s, a)) trans.push_back({s, a, t.index, t.prob});
            for (const auto& o : m.observations(s, a)) obs.push_back({s, a, o.index, o.prob});
            if (m.reward(s, a) != 0.0) rewards.push_back({s, a, m.reward(s, a)});
        }
        if (m.is_terminal(s)) terminal.push_back(s);
    }
    j["transitions"] = std::move(trans);
    j["observations"] = std::move(obs);
    j["rewards"] = std::move(rewards);
    if (!terminal.empty()) j["terminal_states"] = std::move(terminal);
    return j;
}

ModelFile model_from_json(const Json& j) {
    try {
        PomdpModel::Builder b(j.at("num_states").get<int>(), j.at("num_actions").get<int>(),
                              j.at("num_observations").get<int>(), j.at("discount").get<double>());
        for (const auto& t : j.at("transitions"))
            b.transition(t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>(), t.at(3).get<double>());
        for (const auto& o : j.at("observations"))
            b.observation(o.at(0).get<int>(), o.at(1).get<int>(), o.at(2).get<int>(), o.at(3).get<double>());
        for (const auto& r : j.at("rewards")) b.reward(r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<double>());
        if (j.contains("terminal_states")) {
            for (const auto& s : j.at("terminal_states")) b.terminal(s.get<int>());
        }
        std::optional<double> cost;
        if (j.contains("request_cost") && !j.at("request_cost").is_null()) cost = j.at("request_cost").get<double>();
        return ModelFile{b.build(), cost};
    } catch (const Json::exception& e) {
        throw ModelError(std::string("malformed model file: ") + e.what());
    }
}

Json alpha_set_to_json(const AlphaVectorSet& set) {
    Json j;
    j["kind"] = set.kind() == BoundKind::Upper ? "upper" : "lower";
    if (set.request_cost()) j["request_cost"] = *set.request_cost();
    Json vectors = Json::array();
    for (const auto& v : set.vectors()) {
        Json entry;
        if (v.is_request())
            entry["tag"] = "REQUEST";
        else
            entry["tag"] = v.tag;
        entry["values"] = v.values;
        vectors.push_back(std::move(entry));
    }
    j["vectors"] = std::move(vectors);
    return j;
}

AlphaVectorSet alpha_set_from_json(const Json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind != "upper" && kind != "lower") throw ModelError("alpha set kind must be upper or lower");
        std::vector<AlphaVector> vectors;
        for (const auto& v : j.at("vectors")) {
            AlphaVector a;
            const auto& tag = v.at("tag");
            if (tag.is_string()) {
                if (tag.get<std::string>() != "REQUEST") throw ModelError("unknown alpha vector tag");
                a.tag = kRequestTag;
            } else {
                a.tag = tag.get<int>();
            }
            a.values = v.at("values").get<std::vector<double>>();
            vectors.push_back(std::move(a));
        }
        std::optional<double> cost;
        if (j.contains("request_cost")) cost = j.at("request_cost").get<double>();
        return AlphaVectorSet(kind == "upper" ? BoundKind::Upper : BoundKind::Lower, std::move(vectors), cost);
    } catch (const Json::exception& e) {
        throw ModelError(std::string("malformed alpha-vector file: ") + e.what());
    }
}

Json beliefs_to_json(const std::vector<Belief>& beliefs) {
    Json j = Json::array();
    for (const auto& b : beliefs) {
        Json entries = Json::array();
        for (const auto& [s, p] : b.entries()) entries.push_back({s, p});
        j.push_back(std::move(entries));
    }
    return j;
}

std::vector<Belief> beliefs_from_json(const Json& j) {
    try {
        const Json& list = j.is_object() ? j.at("points") : j;
        std::vector<Belief> out;
        for (const auto& point : list) {
            std::vector<Belief::Entry> entries;
            for (const auto& e : point) entries.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
            out.emplace_back(std::move(entries));
        }
        return out;
    } catch (const Json::exception& e) {
        throw ModelError(std::string("malformed belief list: ") + e.what());
    }
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

void save_model(const std::string& path, const PomdpModel& model, std::optional<double> request_cost) {
    write_text_file(path, model_to_json(model, request_cost).dump() + "\n");
}

ModelFile load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

}  // namespace pomdpsr
