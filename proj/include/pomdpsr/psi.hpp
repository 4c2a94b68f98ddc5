#pragma once

#include <vector>

#include "pomdpsr/linalg.hpp"
#include "pomdpsr/search_graph.hpp"

namespace pomdpsr {

/// A fringe reached by the greedy walk, with its origin and discounted path weight from that origin.
struct FringeVisit {
    NodeId node;
    StateId origin;  ///< corner state, or kRootOrigin
    double weight;
};

/**
 * Output of the greedy walk.
 *
 * Matrices are indexed by position in `corners` (visit order), not by state id:
 * psi_bar(i, j) is the weight of direct paths from corner i to corner j and
 * psi_bar_root[j] the weight of direct paths from the root to corner j.
 */
struct WalkResult {
    std::vector<StateId> corners;
    DenseMatrix psi_bar;
    std::vector<double> psi_bar_root;
    std::vector<FringeVisit> fringes;

    /// Position of state s in `corners`, or -1.
    int index_of(StateId s) const;
};

/// Follows greedy edges from the root, accumulating direct-path weights between corners.
WalkResult gwalk(const SearchGraph& g);

/**
 * Total discounted path weight from the root to every corner.
 *
 * Solves psi = psi_bar_root + psi_bar^T psi, i.e. (I - psi_bar)^T psi = psi_bar_root,
 * with dense LU. Throws SingularSystem.
 */
std::vector<double> solve_psi(const DenseMatrix& psi_bar, const std::vector<double>& psi_bar_root);

struct PsiSolution {
    WalkResult walk;
    std::vector<double> psi_root;  ///< aligned with walk.corners
    std::vector<double> fringe_scores;  ///< aligned with walk.fringes

    double psi(StateId origin) const;
};

/// gwalk, solve_psi and the fringe scores psi(origin) * weight * (U(b) - L(b)).
PsiSolution compute_psi(const SearchGraph& g);

struct FringeChoice {
    NodeId node;
    StateId origin;
    double score;
};

/**
 * Highest-scoring greedy-reachable fringe; the root when it is a fringe.
 * Ties go to the first fringe in traversal order. Throws NoReachableFringe.
 */
FringeChoice select_fringe(const SearchGraph& g);

/// Fallback: the fringe with the largest (U(b) - L(b)) * origin weight anywhere in the graph.
FringeChoice select_any_fringe(const SearchGraph& g);

}  // namespace pomdpsr
