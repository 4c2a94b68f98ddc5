#include "pomdpsr/search_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pomdpsr {

SearchGraph::SearchGraph(const PomdpSr& problem, const AlphaVectorSet& lower, const AlphaVectorSet& upper,
                         const Belief& root, GraphOptions options)
    : problem_(&problem), lower_(&lower), upper_(&upper), options_(options), updater_(problem.model),
      corner_registry_(problem.model.num_states(), kNoNode) {
    if (root.phase() != Phase::RequestDecision) throw ModelError("search graph root must be a phase-0 belief");
    add_node(root, kRootOrigin, 1.0, kNoNode);
}

std::vector<NodeId> SearchGraph::corner_nodes() const {
    std::vector<NodeId> out;
    for (NodeId n : corner_registry_) {
        if (n != kNoNode) out.push_back(n);
    }
    return out;
}

NodeId SearchGraph::add_node(Belief b, StateId origin, double weight, NodeId parent) {
    const auto id = static_cast<NodeId>(nodes_.size());
    BeliefNode& node = nodes_.emplace_back();
    node.offline_upper = evaluate(*upper_, b);
    node.offline_lower = evaluate(*lower_, b);
    node.upper = node.offline_upper;
    node.lower = node.offline_lower;
    node.belief = std::move(b);
    node.origin = origin;
    node.origin_weight = weight;
    if (parent != kNoNode) node.parents.push_back(parent);
    return id;
}

NodeId SearchGraph::add_phase1_node(Belief b, StateId origin, double weight, NodeId parent) {
    const auto id = static_cast<NodeId>(nodes_.size());
    BeliefNode& node = nodes_.emplace_back();
    node.belief = std::move(b);
    node.origin = origin;
    node.origin_weight = weight;
    if (parent != kNoNode) node.parents.push_back(parent);
    return id;
}

void SearchGraph::add_env_edges(NodeId n) {
    const PomdpModel& m = problem_->model;
    const double gamma = m.discount();
    std::vector<ActionEdge> edges;
    edges.reserve(m.num_actions());
    for (ActionId a = 0; a < m.num_actions(); ++a) {
        ActionEdge e{a, belief_reward(m, nodes_[n].belief, a), gamma, {}};
        auto successors = updater_.successors(nodes_[n].belief, a, Phase::RequestDecision);
        e.branches.reserve(successors.size());
        for (auto& br : successors) {
            const StateId origin = nodes_[n].origin;
            const double weight = nodes_[n].origin_weight * gamma * br.prob;
            const NodeId child = add_node(std::move(br.next), origin, weight, n);
            e.branches.push_back({br.obs, br.prob, child});
        }
        edges.push_back(std::move(e));
    }
    nodes_[n].edges = std::move(edges);
}

ExpansionRecord SearchGraph::expand(NodeId n) {
    if (!nodes_[n].is_fringe()) throw AlreadyExpanded("node " + std::to_string(n) + " is already expanded");
    if (nodes_[n].phase() != Phase::RequestDecision) throw ModelError("only phase-0 nodes can be expanded");
    const std::size_t before = nodes_.size();
    ExpansionRecord rec{n, kNoNode, {}, {}, 0};

    rec.twin = add_phase1_node(nodes_[n].belief.with_phase(Phase::EnvAction), nodes_[n].origin,
                               nodes_[n].origin_weight, n);
    add_env_edges(rec.twin);
    recompute(rec.twin);

    std::vector<ActionEdge> edges;
    if (options_.allow_requests) {
        ActionEdge req{kRequestAction, -problem_->request_cost, 1.0, {}};
        const auto entries = nodes_[n].belief.entries();
        const std::vector<Belief::Entry> support(entries.begin(), entries.end());
        for (const auto& [s, p] : support) {
            NodeId c = options_.share_corners ? corner_registry_[s] : kNoNode;
            if (c == kNoNode) {
                c = add_phase1_node(corner_belief(s, Phase::EnvAction), s, 1.0, n);
                nodes_[c].corner_state = s;
                if (options_.share_corners) corner_registry_[s] = c;
                add_env_edges(c);
                recompute(c);
                rec.new_corners.push_back(c);
            } else {
                nodes_[c].parents.push_back(n);
                rec.linked_corners.push_back(c);
            }
            req.branches.push_back({s, p, c});
        }
        edges.push_back(std::move(req));
    }
    edges.push_back({kNoRequestAction, 0.0, 1.0, {{-1, 1.0, rec.twin}}});
    nodes_[n].edges = std::move(edges);

    ++expansions_;
    rec.nodes_added = nodes_.size() - before;
    return rec;
}

double SearchGraph::q_upper(const ActionEdge& e) const {
    double v = 0.0;
    for (const auto& br : e.branches) v += br.prob * nodes_[br.child].upper;
    return e.reward + e.discount * v;
}

double SearchGraph::q_lower(const ActionEdge& e) const {
    double v = 0.0;
    for (const auto& br : e.branches) v += br.prob * nodes_[br.child].lower;
    return e.reward + e.discount * v;
}

std::size_t SearchGraph::greedy_edge(NodeId n) const {
    const auto& edges = nodes_[n].edges;
    std::size_t best = 0;
    double best_q = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const double q = q_upper(edges[i]);
        if (q > best_q) {
            best_q = q;
            best = i;
        }
    }
    return best;
}

double SearchGraph::recompute(NodeId n) {
    BeliefNode& node = nodes_[n];
    if (node.is_fringe()) return 0.0;
    double u = -std::numeric_limits<double>::infinity();
    double l = -std::numeric_limits<double>::infinity();
    for (const auto& e : node.edges) {
        u = std::max(u, q_upper(e));
        l = std::max(l, q_lower(e));
    }
    const double change = std::max(std::abs(u - node.upper), std::abs(l - node.lower));
    node.upper = u;
    node.lower = l;
    return change;
}

void SearchGraph::update_ancestors(NodeId start) {
    in_queue_.resize(nodes_.size(), 0);
    queue_.push_back(start);
    in_queue_[start] = 1;
    while (!queue_.empty()) {
        const NodeId n = queue_.front();
        queue_.pop_front();
        in_queue_[n] = 0;
        if (recompute(n) <= options_.update_threshold) continue;
        for (NodeId p : nodes_[n].parents) {
            if (!in_queue_[p]) {
                in_queue_[p] = 1;
                queue_.push_back(p);
            }
        }
    }
}

CornerValues SearchGraph::corner_values(BoundKind kind) const {
    CornerValues out;
    out.source = kind;
    for (NodeId c : corner_nodes()) {
        for (const auto& e : nodes_[c].edges) {
            const double v = kind == BoundKind::Upper ? q_upper(e) : q_lower(e);
            out.values[{nodes_[c].corner_state, e.action}] = v;
        }
    }
    return out;
}

}  // namespace pomdpsr
