#pragma once

#include <vector>

#include "pomdpsr/equivalent.hpp"
#include "pomdpsr/model.hpp"

namespace oracle {

using Vec = std::vector<double>;

/// Max over a set of linear functions of a dense belief.
struct Pwlc {
    std::vector<Vec> vectors;

    double value(const Vec& b) const;
    double value(const pomdpsr::Belief& b) const;
};

/// Removes duplicates, pointwise-dominated vectors and vectors that are nowhere
/// better than the rest by more than `margin` (linear program per vector).
std::vector<Vec> prune(std::vector<Vec> vectors, double margin = 1e-9);

/// Exact native POMDP-SR value function.
struct SrSolution {
    Pwlc decision;  ///< V* before the request decision
    Pwlc action;    ///< V* after the decision, before the environmental action
    int iterations = 0;
    double error_bound = 0.0;
};

/// Alpha-vector value iteration until the a-priori error bound is below target_error.
SrSolution solve_sr(const pomdpsr::PomdpSr& p, double target_error = 1e-9);

/// Exact plain-POMDP value function (no requests).
Pwlc solve_plain(const pomdpsr::PomdpModel& m, double target_error = 1e-9);

/// Exact value function of an equivalent POMDP, split by phase; vectors are over original state ids.
struct EquivalentSolution {
    Pwlc decision;
    Pwlc action;
};
EquivalentSolution solve_equivalent(const pomdpsr::EquivalentPomdp& eq, double target_error = 1e-9);

/// Dense belief from a sparse one.
Vec dense(const pomdpsr::Belief& b, int num_states);

}  // namespace oracle
