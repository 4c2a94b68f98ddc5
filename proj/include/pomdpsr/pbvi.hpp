#pragma once

#include <vector>

#include "pomdpsr/alpha.hpp"
#include "pomdpsr/kernels.hpp"
#include "pomdpsr/model.hpp"
#include "pomdpsr/planner.hpp"
#include "pomdpsr/rng.hpp"

namespace pomdpsr {

/// Belief points for point-based backups; always holds every corner belief, without duplicates.
class BeliefSet {
  public:
    /// All corner beliefs of a model with `num_states` states, then `extra` in order.
    explicit BeliefSet(int num_states, const std::vector<Belief>& extra = {});
    /// A set without the corner guarantee, for experiments that drop corners.
    static BeliefSet without_corners(const std::vector<Belief>& points);

    const std::vector<Belief>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    /// Adds b unless an identical point exists; returns whether it was added.
    bool add(const Belief& b);

  private:
    BeliefSet() = default;
    std::vector<Belief> points_;
};

enum class PbviInit {
    Blind,  ///< start from the Blind lower bound plus its REQUEST vector
    Zero,   ///< start from the zero vector
};

struct PbviOptions {
    long max_iters = 10000;
    double tol = 1e-6;
    PbviInit init = PbviInit::Blind;
    Exec exec = Exec::Serial;
};

/// Starting set for the backups, including a REQUEST vector.
AlphaVectorSet pbvi_initial_set(const PomdpSr& p, PbviInit init);

/**
 * One point-based backup. Each point keeps its best environmental vector computed
 * against gamma_prev (REQUEST vector included); identical vectors are merged and a
 * fresh REQUEST vector -c + max over the new vectors is appended.
 */
AlphaVectorSet pbvi_sr_backup(const PomdpSr& p, const BeliefSet& points, const AlphaVectorSet& gamma_prev,
                              Exec exec = Exec::Serial);

struct ValuePolicy {
    AlphaVectorSet gamma_set;
    long iterations;
    double residual;
};

/// Repeats backups until the largest value change over points is below tol. Throws NonConvergence.
ValuePolicy pbvi_sr_solve(const PomdpSr& p, const BeliefSet& points, const PbviOptions& options = {});

/**
 * Requests when the REQUEST vector wins at b (environmental vectors win ties).
 * For a request, action_by_state holds the action for every state in supp(b).
 */
Decision execute_policy(const ValuePolicy& vp, const Belief& b);

/// One round of stochastic-simulation expansion: each point adds its farthest sampled successor.
void expand_belief_set(const PomdpSr& p, BeliefSet& set, Rng& rng);

}  // namespace pomdpsr
