#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pomdpsr/equivalent.hpp"
#include "pomdpsr/rng.hpp"

namespace pomdpsr {

struct PomcpConfig {
    /// Exploration constant; defaults to the reward range of the equivalent model.
    std::optional<double> uct_c;
    /// Defaults to ceil(log(1e-3) / log(gamma')).
    std::optional<int> rollout_depth;
    int num_particles = 1000;
    long simulations = 10000;
    /// Optional wall-clock cap per call.
    std::optional<double> seconds;
};

/// Config with every default filled in for `eq`.
PomcpConfig resolve_pomcp_config(const EquivalentPomdp& eq, PomcpConfig config);

struct PomcpResult {
    ActionId action;
    long simulations;
    std::vector<std::pair<ActionId, long>> visit_counts;
};

/**
 * UCT search over histories of the equivalent POMDP from a root particle set.
 * Only legal actions are considered; rollouts pick legal actions uniformly.
 * Returns the most visited root action (lowest legal index on ties).
 */
PomcpResult pomcp_plan_step(const EquivalentPomdp& eq, std::span<const StateId> particles, const PomcpConfig& config,
                            Rng& rng);

/// Rejection-sampling particle filter over equivalent-POMDP states.
class ParticleFilter {
  public:
    ParticleFilter() = default;
    explicit ParticleFilter(std::vector<StateId> particles) : particles_(std::move(particles)) {}
    static ParticleFilter from_belief(const Belief& b, int count, Rng& rng);

    std::span<const StateId> particles() const noexcept { return particles_; }
    bool empty() const noexcept { return particles_.empty(); }

    /// Keeps successors consistent with (a, o). Throws ParticleDepletion when none survive.
    void update(const PomdpModel& model, ActionId a, ObsId o, int count, Rng& rng);

  private:
    std::vector<StateId> particles_;
};

}  // namespace pomdpsr
