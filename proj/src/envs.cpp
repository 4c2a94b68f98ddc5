#include <algorithm>
#include <numeric>

#include "pomdpsr/envs.hpp"

namespace pomdpsr {

PomdpSr fib_counterexample(double request_cost, double discount) {
    PomdpModel::Builder b(2, 2, 1, discount);
    for (StateId s = 0; s < 2; ++s) {
        for (ActionId a = 0; a < 2; ++a) {
            b.transition(s, a, 0, 0.5).transition(s, a, 1, 0.5);
            b.observation(s, a, 0, 1.0);
            b.reward(s, a, s == a ? 1.0 : -1.0);
        }
    }
    return PomdpSr(b.build(), request_cost);
}

Environment fib_counterexample_env(double request_cost, double discount) {
    return Environment{"counterexample", fib_counterexample(request_cost, discount), Belief({{0, 0.5}, {1, 0.5}}),
                       {}, {}};
}

namespace {

/// Random distribution over `n` outcomes with at most `support` nonzeros (all when 0).
std::vector<std::pair<int, double>> random_row(int n, int support, Rng& rng) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const int k = support <= 0 ? n : std::min(support, n);
    for (int i = 0; i < k; ++i) std::swap(idx[i], idx[i + static_cast<int>(rng.below(n - i))]);
    std::vector<std::pair<int, double>> row;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        const double w = 0.05 + rng.uniform();
        row.emplace_back(idx[i], w);
        total += w;
    }
    for (auto& [j, p] : row) p /= total;
    return row;
}

}  // namespace

PomdpSr random_pomdp_sr(const RandomModelSpec& spec, Rng& rng) {
    PomdpModel::Builder b(spec.num_states, spec.num_actions, spec.num_observations, spec.discount);
    for (StateId s = 0; s < spec.num_states; ++s) {
        for (ActionId a = 0; a < spec.num_actions; ++a) {
            for (const auto& [j, p] : random_row(spec.num_states, spec.transition_support, rng)) b.transition(s, a, j, p);
            for (const auto& [o, p] : random_row(spec.num_observations, spec.observation_support, rng))
                b.observation(s, a, o, p);
            b.reward(s, a, 2.0 * rng.uniform() - 1.0);
        }
    }
    return PomdpSr(b.build(), spec.request_cost);
}

StateId sample_state(const Belief& b, Rng& rng) {
    const auto entries = b.entries();
    const std::size_t i = rng.categorical(entries, [](const Belief::Entry& e) { return e.second; });
    return entries[i].first;
}

StepOutcome simulate(const PomdpSr& p, StateId s, const Decision& decision, Rng& rng) {
    const PomdpModel& m = p.model;
    if (m.is_terminal(s)) throw ModelError("cannot simulate from a terminal state");
    StepOutcome out{};
    if (decision.request) out.revealed = s;
    out.action = decision.action_for(s);
    const auto trans = m.transitions(s, out.action);
    out.next_state = trans[rng.categorical(trans, [](const SparseEntry& e) { return e.prob; })].index;
    const auto obs = m.observations(out.next_state, out.action);
    out.observation = obs[rng.categorical(obs, [](const SparseEntry& e) { return e.prob; })].index;
    out.reward = m.reward(s, out.action) - (decision.request ? p.request_cost : 0.0);
    out.done = m.is_terminal(out.next_state);
    return out;
}

StepOutcome simulate(const Environment& env, StateId s, const Decision& decision, Rng& rng) {
    StepOutcome out = simulate(env.problem, s, decision, rng);
    if (env.realized_reward) {
        out.reward = env.realized_reward(s, out.action, out.next_state) -
                     (decision.request ? env.problem.request_cost : 0.0);
    }
    return out;
}

}  // namespace pomdpsr
