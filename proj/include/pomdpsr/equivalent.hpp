#pragma once

#include <vector>

#include "pomdpsr/model.hpp"

namespace pomdpsr {

/**
 * Plain POMDP with a variable action space that mimics a POMDP-SR.
 *
 * Layout, for an original model with |S| states, |A| actions and |O| observations:
 *   states        s0 = s (request-decision phase), s1 = |S| + s (environmental phase)
 *   actions       0..|A|-1 environmental, |A| = request, |A|+1 = no-request
 *   observations  0..|O|-1 original, |O| + s reveals state s, |O| + |S| is the no-request marker
 *   discount      sqrt(original discount)
 *
 * Illegal (state, action) pairs carry a self-loop, the no-request marker and zero
 * reward so that every row of the underlying model stays a distribution; planners
 * must consult legal_actions().
 */
class EquivalentPomdp {
  public:
    const PomdpModel& model() const noexcept { return model_; }
    const std::vector<ActionId>& legal_actions(StateId s) const { return legal_[s]; }

    int original_states() const noexcept { return original_states_; }
    int original_actions() const noexcept { return original_actions_; }
    int original_observations() const noexcept { return original_observations_; }

    ActionId request_action() const noexcept { return original_actions_; }
    ActionId no_request_action() const noexcept { return original_actions_ + 1; }
    ObsId reveal_observation(StateId s) const noexcept { return original_observations_ + s; }
    ObsId no_request_observation() const noexcept { return original_observations_ + original_states_; }

    StateId decision_state(StateId s) const noexcept { return s; }
    StateId action_state(StateId s) const noexcept { return original_states_ + s; }
    bool is_decision_state(StateId s) const noexcept { return s < original_states_; }
    StateId original_state(StateId s) const noexcept { return s % original_states_; }

  private:
    friend EquivalentPomdp to_equivalent_pomdp(const PomdpSr& p);
    EquivalentPomdp(PomdpModel model, std::vector<std::vector<ActionId>> legal, int s, int a, int o)
        : model_(std::move(model)), legal_(std::move(legal)), original_states_(s), original_actions_(a),
          original_observations_(o) {}

    PomdpModel model_;
    std::vector<std::vector<ActionId>> legal_;
    int original_states_;
    int original_actions_;
    int original_observations_;
};

/// Splits every timestep into a request phase and an action phase.
EquivalentPomdp to_equivalent_pomdp(const PomdpSr& p);

}  // namespace pomdpsr
