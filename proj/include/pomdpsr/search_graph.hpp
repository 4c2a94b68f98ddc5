#pragma once

#include <deque>
#include <vector>

#include "pomdpsr/alpha.hpp"
#include "pomdpsr/bounds.hpp"
#include "pomdpsr/model.hpp"

namespace pomdpsr {

using NodeId = int;
inline constexpr NodeId kNoNode = -1;
/// Origin value of nodes whose request-free path starts at the root.
inline constexpr StateId kRootOrigin = -1;

// Graph action ids. The numeric order is the tie-break order of greedy selection:
// request, then no-request, then environmental actions by id.
inline constexpr ActionId kRequestAction = -2;
inline constexpr ActionId kNoRequestAction = -1;

/// One outcome of an edge: an observation id, or the revealed state on request edges.
struct Branch {
    int label;
    double prob;
    NodeId child;
};

struct ActionEdge {
    ActionId action;
    double reward;    ///< R(b,a), -c for request, 0 for no-request
    double discount;  ///< gamma for environmental edges, 1 otherwise
    std::vector<Branch> branches;
};

struct BeliefNode {
    Belief belief;
    double upper = 0.0;  ///< U_G
    double lower = 0.0;  ///< L_G
    double offline_upper = 0.0;
    double offline_lower = 0.0;
    std::vector<ActionEdge> edges;  ///< empty exactly for fringes
    std::vector<NodeId> parents;
    StateId origin = kRootOrigin;
    double origin_weight = 1.0;
    StateId corner_state = -1;  ///< set on corner nodes

    Phase phase() const noexcept { return belief.phase(); }
    bool is_fringe() const noexcept { return edges.empty(); }
    bool is_corner() const noexcept { return corner_state >= 0; }
    double offline_gap() const noexcept { return offline_upper - offline_lower; }
};

struct GraphOptions {
    /// Reuse one node per corner state; off gives the AEMS tree.
    bool share_corners = true;
    /// Off masks the request action, leaving a plain POMDP search.
    bool allow_requests = true;
    double update_threshold = 1e-6;
};

struct ExpansionRecord {
    NodeId node;
    NodeId twin;
    std::vector<NodeId> new_corners;
    std::vector<NodeId> linked_corners;
    std::size_t nodes_added;
};

/**
 * Rooted AND/OR graph over beliefs for a POMDP-SR.
 *
 * Phase-0 nodes decide whether to request; phase-1 nodes pick the environmental
 * action. Fringes are always phase-0 nodes. Corner nodes are phase-1 nodes keyed
 * by state and may have many parents, which makes the graph cyclic.
 */
class SearchGraph {
  public:
    SearchGraph(const PomdpSr& problem, const AlphaVectorSet& lower, const AlphaVectorSet& upper, const Belief& root,
                GraphOptions options = {});

    NodeId root() const noexcept { return 0; }
    const BeliefNode& node(NodeId n) const { return nodes_[n]; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    long expansion_count() const noexcept { return expansions_; }
    const GraphOptions& options() const noexcept { return options_; }
    const PomdpSr& problem() const noexcept { return *problem_; }

    /// Registered corner node of state s, or kNoNode.
    NodeId corner(StateId s) const { return corner_registry_[s]; }
    std::vector<NodeId> corner_nodes() const;

    /// Expands a phase-0 fringe. Throws AlreadyExpanded.
    ExpansionRecord expand(NodeId n);

    /// Asynchronous Bellman updates from `start` towards the root.
    void update_ancestors(NodeId start);

    double q_upper(const ActionEdge& e) const;
    double q_lower(const ActionEdge& e) const;

    /// Index into node(n).edges maximizing q_upper; the first edge wins ties.
    std::size_t greedy_edge(NodeId n) const;
    ActionId greedy_action(NodeId n) const { return nodes_[n].edges[greedy_edge(n)].action; }

    /// U_G(s,a) or L_G(s,a) at every registered corner.
    CornerValues corner_values(BoundKind kind) const;

  private:
    NodeId add_node(Belief b, StateId origin, double weight, NodeId parent);
    NodeId add_phase1_node(Belief b, StateId origin, double weight, NodeId parent);
    void add_env_edges(NodeId n);
    /// Recomputes U_G/L_G from the children; returns the largest absolute change.
    double recompute(NodeId n);

    const PomdpSr* problem_;
    const AlphaVectorSet* lower_;
    const AlphaVectorSet* upper_;
    GraphOptions options_;
    BeliefUpdater updater_;
    std::vector<BeliefNode> nodes_;
    std::vector<NodeId> corner_registry_;
    long expansions_ = 0;

    std::deque<NodeId> queue_;
    std::vector<char> in_queue_;
};

}  // namespace pomdpsr
