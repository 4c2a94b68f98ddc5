#pragma once

#include <cmath>
#include <vector>

#include "pomdpsr/envs.hpp"
#include "pomdpsr/model.hpp"
#include "pomdpsr/rng.hpp"

namespace testing {

inline pomdpsr::Belief random_belief(int num_states, pomdpsr::Rng& rng) {
    std::vector<pomdpsr::Belief::Entry> e;
    for (int s = 0; s < num_states; ++s) {
        const double w = rng.uniform();
        if (w > 0.25) e.emplace_back(s, w);
    }
    if (e.empty()) e.emplace_back(static_cast<int>(rng.below(num_states)), 1.0);
    return pomdpsr::Belief(e);
}

inline pomdpsr::Belief uniform_belief(int num_states) {
    std::vector<pomdpsr::Belief::Entry> e;
    for (int s = 0; s < num_states; ++s) e.emplace_back(s, 1.0);
    return pomdpsr::Belief(e);
}

inline pomdpsr::PomdpSr random_problem(std::uint64_t seed, int states, int actions = 2, int obs = 2,
                                       double gamma = 0.9, double cost = 0.1) {
    pomdpsr::Rng rng(seed, 11);
    pomdpsr::RandomModelSpec spec;
    spec.num_states = states;
    spec.num_actions = actions;
    spec.num_observations = obs;
    spec.discount = gamma;
    spec.request_cost = cost;
    return pomdpsr::random_pomdp_sr(spec, rng);
}

/// Copy of a problem with a different request cost.
inline pomdpsr::PomdpSr with_cost(const pomdpsr::PomdpSr& p, double cost) { return pomdpsr::PomdpSr(p.model, cost); }

}  // namespace testing
