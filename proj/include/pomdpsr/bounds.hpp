#pragma once

#include <map>
#include <utility>

#include "pomdpsr/alpha.hpp"
#include "pomdpsr/kernels.hpp"
#include "pomdpsr/model.hpp"

namespace pomdpsr {

/// Where fixed-point iterations start.
enum class BoundInit {
    Zero,         ///< all vectors start at 0
    RewardBound,  ///< upper solvers start at R_max / (1 - gamma), lower ones at R_min / (1 - gamma)
};

struct SolverOptions {
    double tol = 1e-6;
    long max_iters = 1'000'000;
    BoundInit init = BoundInit::Zero;
    Exec exec = Exec::Serial;
};

/// One vector per action: value of always playing that action. Lower bound.
AlphaVectorSet blind_lower_bound(const PomdpModel& model, const SolverOptions& opts = {});

/// Q-values of the underlying MDP. Upper bound.
AlphaVectorSet qmdp(const PomdpModel& model, const SolverOptions& opts = {});

/// Fast informed bound: accounts for the next observation. Upper bound.
AlphaVectorSet fib(const PomdpModel& model, const SolverOptions& opts = {});

/**
 * FIB with a REQUEST vector alpha_c(s) = -c + max_a alpha_a(s).
 *
 * Each round performs one full sweep of the environmental vectors against
 * {alpha_a} + {alpha_c}, then re-derives alpha_c from the new vectors.
 */
AlphaVectorSet fib_sr(const PomdpSr& p, const SolverOptions& opts = {});

/// Graph-derived per-corner action values, U_G(s,a) or L_G(s,a).
struct CornerValues {
    BoundKind source = BoundKind::Upper;
    std::map<std::pair<StateId, ActionId>, double> values;
};

/**
 * Tightens a set in place of its own entries: alpha_a(s) <- min(alpha_a(s), U_G(s,a))
 * for upper sets and max(...) with L_G for lower sets. A REQUEST vector is
 * re-derived afterwards and never loosened. Throws KindMismatch when the source
 * direction disagrees with the set kind.
 */
AlphaVectorSet improve_from_graph(const AlphaVectorSet& set, const CornerValues& corner_values);

}  // namespace pomdpsr
