#include "pomdpsr/psi.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace pomdpsr {

int WalkResult::index_of(StateId s) const {
    const auto it = std::find(corners.begin(), corners.end(), s);
    return it == corners.end() ? -1 : static_cast<int>(it - corners.begin());
}

namespace {

class Walker {
  public:
    explicit Walker(const SearchGraph& g)
        : g_(g), gamma_(g.problem().model.discount()), slot_(g.problem().model.num_states(), -1) {}

    WalkResult run() {
        visit(g_.root(), kRootOrigin, 1.0);
        const std::size_t k = out_.corners.size();
        out_.psi_bar = DenseMatrix(k);
        out_.psi_bar_root.assign(k, 0.0);
        for (const auto& [from, to, w] : direct_) {
            if (from == kRootOrigin)
                out_.psi_bar_root[slot_[to]] += w;
            else
                out_.psi_bar(slot_[from], slot_[to]) += w;
        }
        return std::move(out_);
    }

  private:
    void visit(NodeId n, StateId origin, double weight) {
        const BeliefNode& node = g_.node(n);
        if (node.is_fringe()) {
            out_.fringes.push_back({n, origin, weight});
            return;
        }
        const ActionEdge& e = node.edges[g_.greedy_edge(n)];
        if (e.action == kRequestAction) {
            for (const auto& br : e.branches) {
                const StateId s = br.label;
                direct_.emplace_back(origin, s, br.prob * weight);
                if (slot_[s] < 0) {
                    slot_[s] = static_cast<int>(out_.corners.size());
                    out_.corners.push_back(s);
                    visit(br.child, s, 1.0);
                }
            }
        } else if (e.action == kNoRequestAction) {
            visit(e.branches.front().child, origin, weight);
        } else {
            for (const auto& br : e.branches) visit(br.child, origin, weight * gamma_ * br.prob);
        }
    }

    const SearchGraph& g_;
    double gamma_;
    std::vector<int> slot_;
    std::vector<std::tuple<StateId, StateId, double>> direct_;
    WalkResult out_;
};

}  // namespace

WalkResult gwalk(const SearchGraph& g) {
    if (!g.options().share_corners) throw ModelError("gwalk needs a graph with shared corners");
    return Walker(g).run();
}

std::vector<double> solve_psi(const DenseMatrix& psi_bar, const std::vector<double>& psi_bar_root) {
    const std::size_t k = psi_bar.size();
    if (k == 0) return {};
    DenseMatrix a(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) a(i, j) = (i == j ? 1.0 : 0.0) - psi_bar(j, i);
    }
    return lu_solve(a, psi_bar_root);
}

double PsiSolution::psi(StateId origin) const {
    if (origin == kRootOrigin) return 1.0;
    const int i = walk.index_of(origin);
    return i < 0 ? 0.0 : psi_root[i];
}

PsiSolution compute_psi(const SearchGraph& g) {
    PsiSolution sol;
    sol.walk = gwalk(g);
    sol.psi_root = solve_psi(sol.walk.psi_bar, sol.walk.psi_bar_root);
    std::vector<double> by_slot(g.problem().model.num_states(), 0.0);
    for (std::size_t i = 0; i < sol.walk.corners.size(); ++i) by_slot[sol.walk.corners[i]] = sol.psi_root[i];
    sol.fringe_scores.reserve(sol.walk.fringes.size());
    for (const auto& f : sol.walk.fringes) {
        const double psi = f.origin == kRootOrigin ? 1.0 : by_slot[f.origin];
        sol.fringe_scores.push_back(psi * f.weight * g.node(f.node).offline_gap());
    }
    return sol;
}

FringeChoice select_fringe(const SearchGraph& g) {
    if (g.node(g.root()).is_fringe()) return {g.root(), kRootOrigin, g.node(g.root()).offline_gap()};
    const PsiSolution sol = compute_psi(g);
    if (sol.walk.fringes.empty()) throw NoReachableFringe("greedy policy reaches no fringe");
    std::size_t best = 0;
    for (std::size_t i = 1; i < sol.fringe_scores.size(); ++i) {
        if (sol.fringe_scores[i] > sol.fringe_scores[best]) best = i;
    }
    const auto& f = sol.walk.fringes[best];
    return {f.node, f.origin, sol.fringe_scores[best]};
}

FringeChoice select_any_fringe(const SearchGraph& g) {
    FringeChoice best{kNoNode, kRootOrigin, -std::numeric_limits<double>::infinity()};
    for (NodeId n = 0; n < static_cast<NodeId>(g.node_count()); ++n) {
        const BeliefNode& node = g.node(n);
        if (!node.is_fringe()) continue;
        const double score = node.offline_gap() * node.origin_weight;
        if (score > best.score) best = {n, node.origin, score};
    }
    if (best.node == kNoNode) throw NoReachableFringe("graph has no fringe");
    return best;
}

}  // namespace pomdpsr
