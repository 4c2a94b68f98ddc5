#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "pomdpsr/alpha.hpp"
#include "pomdpsr/model.hpp"
#include "pomdpsr/psi.hpp"
#include "pomdpsr/search_graph.hpp"

namespace pomdpsr {

/// Per-step planning budget. Unset limits are ignored; with none set the planner runs until solved.
struct Budget {
    std::optional<long> max_expansions;
    std::optional<double> seconds;

    static Budget expansions(long n) { return {n, std::nullopt}; }
    static Budget wall_clock(double s) { return {std::nullopt, s}; }
};

struct PlannerOptions {
    Budget budget;
    double epsilon = 1e-3;
    double update_threshold = 1e-6;
    /// Off masks the request action (plain POMDP search).
    bool allow_requests = true;
};

struct PlanStats {
    long expansions = 0;
    double root_upper_before = 0.0;
    double root_lower_before = 0.0;
    double root_upper = 0.0;
    double root_lower = 0.0;
    bool solved = false;
    /// Iterations where the greedy walk reached no fringe and the global fallback was used.
    long fallback_selections = 0;

    double root_gap() const { return root_upper - root_lower; }
};

struct Decision {
    bool request = false;
    /// Environmental action when not requesting.
    ActionId action = 0;
    /// Environmental action per revealed state when requesting.
    std::vector<std::pair<StateId, ActionId>> action_by_state;
    PlanStats stats;

    /// Action to take after the request revealed `s`; `action` when not requesting.
    ActionId action_for(StateId s) const;
};

/// One planner iteration as written to the JSONL trace.
struct TraceRecord {
    long iteration;
    StateId origin;  ///< kRootOrigin for ROOT
    double score;
    double root_upper;
    double root_lower;
    std::size_t node_count;
};
using TraceSink = std::function<void(const TraceRecord&)>;

enum class Heuristic {
    GraphPsi,   ///< AEMS-SR: Psi-weighted fringe scores over the cyclic graph
    TreePath,   ///< AEMS: gamma^d * P(h) * gap over a tree
};

/**
 * Anytime planner for one real timestep.
 *
 * Each call builds a fresh graph rooted at b0; the graph of the last call stays
 * available for bound improvement until the next call.
 */
class AnytimePlanner {
  public:
    AnytimePlanner(const PomdpSr& problem, Heuristic heuristic, PlannerOptions options);

    Decision plan(const AlphaVectorSet& lower, const AlphaVectorSet& upper, const Belief& b0,
                  const TraceSink& trace = {});

    const SearchGraph* graph() const { return graph_.get(); }
    const PlannerOptions& options() const noexcept { return options_; }

  private:
    const PomdpSr* problem_;
    Heuristic heuristic_;
    PlannerOptions options_;
    std::unique_ptr<SearchGraph> graph_;
};

/// AEMS-SR for one timestep.
Decision plan_step(const PomdpSr& p, const AlphaVectorSet& lower, const AlphaVectorSet& upper, const Belief& b0,
                   const PlannerOptions& options, const TraceSink& trace = {});

/// AEMS on the tree-shaped two-phase search space.
Decision aems_plan_step(const PomdpSr& p, const AlphaVectorSet& lower, const AlphaVectorSet& upper,
                        const Belief& b0, const PlannerOptions& options, const TraceSink& trace = {});

/// Highest gamma^d * P(h) * gap fringe along greedy paths of a tree-shaped graph.
FringeChoice select_fringe_tree(const SearchGraph& g);

/// Decision read off the lower bounds of an expanded graph, or off the lower set when the root is a fringe.
Decision decide(const SearchGraph& g, const AlphaVectorSet& lower);

}  // namespace pomdpsr
