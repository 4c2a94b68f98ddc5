#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pomdpsr/envs.hpp"
#include "pomdpsr/io.hpp"
#include "pomdpsr/planner.hpp"
#include "pomdpsr/pomcp.hpp"

namespace pomdpsr {

enum class PlannerKind { AemsSr, Aems, Pomcp, PbviPolicy };
enum class UpperBoundKind { Qmdp, FibSr };

struct PbviSettings {
    std::vector<Belief> points;
    int expansion_rounds = 0;
    long max_iters = 10000;
    double tol = 1e-6;
};

struct ExperimentConfig {
    /// {"name": "robot-delivery" | "tag" | "counterexample" | "model-file", ...parameters}
    Json environment = Json::object();
    PlannerKind planner = PlannerKind::AemsSr;
    UpperBoundKind upper_bound = UpperBoundKind::FibSr;
    bool improve_bounds = false;
    Budget budget;
    double epsilon = 1e-3;
    int episodes = 1;
    std::uint64_t seed = 1;
    /// Explicit per-episode seeds; overrides seed + index.
    std::vector<std::uint64_t> seeds;
    /// Initial states used round-robin across episodes; empty samples them.
    std::vector<StateId> initial_states;
    PomcpConfig pomcp;
    PbviSettings pbvi;
    /// Episodes stop once gamma^t falls below this.
    double discount_cutoff = 1e-4;
    int jobs = 1;
    std::string label;

    static ExperimentConfig from_json(const Json& j);
    Json to_json() const;
    std::uint64_t episode_seed(int index) const;
};

struct EpisodeResult {
    std::uint64_t seed = 0;
    StateId initial_state = 0;
    double discounted_return = 0.0;
    std::vector<long> expansions;  ///< NE per step
    std::vector<double> error_reduction;  ///< ER per step
    int steps = 0;
    int requests = 0;
    bool terminated = false;
};

struct Summary {
    double mean = 0.0;
    double standard_error = 0.0;
};
Summary summarize(const std::vector<double>& xs);

struct ExperimentResult {
    std::string label;
    ExperimentConfig config;
    std::vector<EpisodeResult> episodes;  ///< sorted by seed

    Summary returns() const;
    /// Mean over episodes of each episode's mean per-step NE / ER.
    Summary expansions() const;
    Summary error_reduction() const;
};

Environment make_environment(const Json& spec);

/// Trace records carry the episode index and step in addition to the planner fields.
struct TraceOptions {
    std::string path;  ///< JSONL file; empty disables tracing
    int episode = 0;   ///< only this episode index is traced
};

ExperimentResult run_experiment(const ExperimentConfig& config, const TraceOptions& trace = {});

/// Per-episode rows: seed, initial state, return, steps, requests, mean NE, mean ER, terminated.
std::string results_csv(const ExperimentResult& result);

/// One row per result with Return / NE / ER; '*' marks the highest mean return.
std::string compare_table(const std::vector<ExperimentResult>& results);
std::string compare_csv(const std::vector<ExperimentResult>& results);

std::string planner_name(PlannerKind k);

}  // namespace pomdpsr
