#include "pomdpsr/planner.hpp"

#include <chrono>
#include <limits>

#include "pomdpsr/psi.hpp"

namespace pomdpsr {

ActionId Decision::action_for(StateId s) const {
    if (!request) return action;
    for (const auto& [state, a] : action_by_state) {
        if (state == s) return a;
    }
    throw ModelError("revealed state " + std::to_string(s) + " is outside the planned support");
}

namespace {

class TreeWalker {
  public:
    explicit TreeWalker(const SearchGraph& g) : g_(g), gamma_(g.problem().model.discount()) {}

    FringeChoice run() {
        for (NodeId n = 0; n < static_cast<NodeId>(g_.node_count()); ++n) {
            if (g_.node(n).is_fringe()) max_gap_ = std::max(max_gap_, g_.node(n).offline_gap());
        }
        visit(g_.root(), 1.0);
        if (best_.node == kNoNode) throw NoReachableFringe("greedy policy reaches no fringe");
        return best_;
    }

  private:
    void visit(NodeId n, double weight) {
        // Path weights only shrink, so nothing below can beat the incumbent.
        if (best_.node != kNoNode && max_gap_ >= 0.0 && weight * max_gap_ <= best_.score) return;
        const BeliefNode& node = g_.node(n);
        if (node.is_fringe()) {
            const double score = weight * node.offline_gap();
            if (best_.node == kNoNode || score > best_.score) best_ = {n, node.origin, score};
            return;
        }
        const ActionEdge& e = node.edges[g_.greedy_edge(n)];
        if (e.action == kRequestAction) {
            for (const auto& br : e.branches) visit(br.child, br.prob * weight);
        } else if (e.action == kNoRequestAction) {
            visit(e.branches.front().child, weight);
        } else {
            for (const auto& br : e.branches) visit(br.child, weight * gamma_ * br.prob);
        }
    }

    const SearchGraph& g_;
    double gamma_;
    double max_gap_ = -std::numeric_limits<double>::infinity();
    FringeChoice best_{kNoNode, kRootOrigin, 0.0};
};

std::size_t argmax_lower(const SearchGraph& g, NodeId n) {
    const auto& edges = g.node(n).edges;
    std::size_t best = 0;
    double best_q = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const double q = g.q_lower(edges[i]);
        if (q > best_q) {
            best_q = q;
            best = i;
        }
    }
    return best;
}

ActionId best_env_vector(const AlphaVectorSet& set, const Belief& b) {
    ActionId best = -1;
    double best_v = -std::numeric_limits<double>::infinity();
    for (const auto& v : set.vectors()) {
        if (v.is_request()) continue;
        const double x = v.dot(b);
        if (x > best_v || (x == best_v && v.tag < best)) {
            best_v = x;
            best = v.tag;
        }
    }
    return best;
}

}  // namespace

FringeChoice select_fringe_tree(const SearchGraph& g) {
    if (g.node(g.root()).is_fringe()) return {g.root(), kRootOrigin, g.node(g.root()).offline_gap()};
    return TreeWalker(g).run();
}

Decision decide(const SearchGraph& g, const AlphaVectorSet& lower) {
    Decision d;
    const BeliefNode& root = g.node(g.root());
    if (root.is_fringe()) {
        const AlphaVector& v = lower.vectors()[argmax_vector(lower, root.belief)];
        if (v.is_request() && g.options().allow_requests) {
            d.request = true;
            for (const auto& [s, p] : root.belief.entries())
                d.action_by_state.emplace_back(s, best_env_vector(lower, corner_belief(s)));
        } else {
            d.action = v.is_request() ? best_env_vector(lower, root.belief) : v.tag;
        }
        return d;
    }

    // Root edges are [request, no-request] or [no-request]; ties keep the cheaper no-request.
    const ActionEdge* no_request = &root.edges.back();
    const ActionEdge* request = root.edges.size() > 1 ? &root.edges.front() : nullptr;
    if (request && g.q_lower(*request) > g.q_lower(*no_request)) {
        d.request = true;
        for (const auto& br : request->branches) {
            const BeliefNode& corner = g.node(br.child);
            d.action_by_state.emplace_back(br.label, corner.edges[argmax_lower(g, br.child)].action);
        }
    } else {
        const NodeId twin = no_request->branches.front().child;
        d.action = g.node(twin).edges[argmax_lower(g, twin)].action;
    }
    return d;
}

AnytimePlanner::AnytimePlanner(const PomdpSr& problem, Heuristic heuristic, PlannerOptions options)
    : problem_(&problem), heuristic_(heuristic), options_(options) {}

Decision AnytimePlanner::plan(const AlphaVectorSet& lower, const AlphaVectorSet& upper, const Belief& b0,
                              const TraceSink& trace) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    GraphOptions gopts;
    gopts.share_corners = heuristic_ == Heuristic::GraphPsi;
    gopts.allow_requests = options_.allow_requests;
    gopts.update_threshold = options_.update_threshold;
    graph_ = std::make_unique<SearchGraph>(*problem_, lower, upper, b0, gopts);
    SearchGraph& g = *graph_;

    PlanStats stats;
    stats.root_upper_before = g.node(g.root()).upper;
    stats.root_lower_before = g.node(g.root()).lower;

    auto out_of_budget = [&] {
        if (options_.budget.max_expansions && g.expansion_count() >= *options_.budget.max_expansions) return true;
        if (options_.budget.seconds) {
            const std::chrono::duration<double> elapsed = Clock::now() - start;
            if (elapsed.count() >= *options_.budget.seconds) return true;
        }
        return false;
    };
    auto gap = [&] { return g.node(g.root()).upper - g.node(g.root()).lower; };

    long iteration = 0;
    while (!out_of_budget()) {
        if (gap() <= options_.epsilon) {
            stats.solved = true;
            break;
        }
        FringeChoice choice{};
        try {
            choice = heuristic_ == Heuristic::GraphPsi ? select_fringe(g) : select_fringe_tree(g);
        } catch (const NoReachableFringe&) {
            try {
                choice = select_any_fringe(g);
            } catch (const NoReachableFringe&) {
                break;
            }
            ++stats.fallback_selections;
        }
        g.expand(choice.node);
        g.update_ancestors(choice.node);
        ++iteration;
        if (trace) {
            trace({iteration, choice.origin, choice.score, g.node(g.root()).upper, g.node(g.root()).lower,
                   g.node_count()});
        }
    }
    if (!stats.solved && gap() <= options_.epsilon) stats.solved = true;

    Decision d = decide(g, lower);
    stats.expansions = g.expansion_count();
    stats.root_upper = g.node(g.root()).upper;
    stats.root_lower = g.node(g.root()).lower;
    d.stats = stats;
    return d;
}

Decision plan_step(const PomdpSr& p, const AlphaVectorSet& lower, const AlphaVectorSet& upper, const Belief& b0,
                   const PlannerOptions& options, const TraceSink& trace) {
    AnytimePlanner planner(p, Heuristic::GraphPsi, options);
    return planner.plan(lower, upper, b0, trace);
}

Decision aems_plan_step(const PomdpSr& p, const AlphaVectorSet& lower, const AlphaVectorSet& upper,
                        const Belief& b0, const PlannerOptions& options, const TraceSink& trace) {
    AnytimePlanner planner(p, Heuristic::TreePath, options);
    return planner.plan(lower, upper, b0, trace);
}

}  // namespace pomdpsr
