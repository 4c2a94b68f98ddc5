#include "pomdpsr/pomcp.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "pomdpsr/envs.hpp"

namespace pomdpsr {

PomcpConfig resolve_pomcp_config(const EquivalentPomdp& eq, PomcpConfig config) {
    const PomdpModel& m = eq.model();
    if (!config.uct_c) config.uct_c = std::max(m.max_reward() - m.min_reward(), 1e-9);
    if (!config.rollout_depth)
        config.rollout_depth = static_cast<int>(std::ceil(std::log(1e-3) / std::log(m.discount())));
    if (config.num_particles <= 0) throw ConfigError("num_particles must be positive");
    if (config.simulations <= 0 && !config.seconds) throw ConfigError("POMCP needs a simulation or time budget");
    return config;
}

namespace {

struct ActionNode {
    ActionId action;
    long visits = 0;
    double value = 0.0;
    std::vector<std::pair<ObsId, int>> children;
};

struct HistoryNode {
    long visits = 0;
    std::vector<ActionNode> actions;
};

class Search {
  public:
    Search(const EquivalentPomdp& eq, const PomcpConfig& cfg, Rng& rng)
        : eq_(eq), m_(eq.model()), cfg_(cfg), rng_(rng), gamma_(m_.discount()) {
        nodes_.emplace_back();
    }

    void simulate_from(StateId s) { simulate(s, 0, 0); }

    const HistoryNode& root() const { return nodes_.front(); }

  private:
    std::pair<StateId, ObsId> step(StateId s, ActionId a) {
        const auto trans = m_.transitions(s, a);
        const StateId next = trans[rng_.categorical(trans, [](const SparseEntry& e) { return e.prob; })].index;
        const auto obs = m_.observations(next, a);
        const ObsId o = obs[rng_.categorical(obs, [](const SparseEntry& e) { return e.prob; })].index;
        return {next, o};
    }

    double rollout(StateId s, int depth) {
        double total = 0.0;
        double discount = 1.0;
        for (int d = depth; d < *cfg_.rollout_depth && !m_.is_terminal(s); ++d) {
            const auto& legal = eq_.legal_actions(s);
            const ActionId a = legal[rng_.below(legal.size())];
            total += discount * m_.reward(s, a);
            s = step(s, a).first;
            discount *= gamma_;
        }
        return total;
    }

    double simulate(StateId s, int node_id, int depth) {
        if (depth >= *cfg_.rollout_depth || m_.is_terminal(s)) return 0.0;
        if (nodes_[node_id].actions.empty()) {
            for (ActionId a : eq_.legal_actions(s)) nodes_[node_id].actions.push_back(ActionNode{a, 0, 0.0, {}});
            nodes_[node_id].visits = 1;
            return rollout(s, depth);
        }

        HistoryNode& node = nodes_[node_id];
        std::size_t pick = 0;
        double best = -std::numeric_limits<double>::infinity();
        const double log_n = std::log(static_cast<double>(node.visits));
        for (std::size_t i = 0; i < node.actions.size(); ++i) {
            const ActionNode& an = node.actions[i];
            if (an.visits == 0) {
                pick = i;
                break;
            }
            const double ucb = an.value + *cfg_.uct_c * std::sqrt(log_n / static_cast<double>(an.visits));
            if (ucb > best) {
                best = ucb;
                pick = i;
            }
        }
        const ActionId a = node.actions[pick].action;
        const auto [next, o] = step(s, a);
        const double r = m_.reward(s, a);

        int child = -1;
        for (const auto& [obs, id] : nodes_[node_id].actions[pick].children) {
            if (obs == o) child = id;
        }
        if (child < 0) {
            child = static_cast<int>(nodes_.size());
            nodes_.emplace_back();
            nodes_[node_id].actions[pick].children.emplace_back(o, child);
        }
        const double ret = r + gamma_ * simulate(next, child, depth + 1);

        HistoryNode& n2 = nodes_[node_id];
        ActionNode& an = n2.actions[pick];
        ++n2.visits;
        ++an.visits;
        an.value += (ret - an.value) / static_cast<double>(an.visits);
        return ret;
    }

    const EquivalentPomdp& eq_;
    const PomdpModel& m_;
    const PomcpConfig& cfg_;
    Rng& rng_;
    double gamma_;
    std::vector<HistoryNode> nodes_;
};

}  // namespace

PomcpResult pomcp_plan_step(const EquivalentPomdp& eq, std::span<const StateId> particles, const PomcpConfig& config,
                            Rng& rng) {
    if (particles.empty()) throw ParticleDepletion("POMCP called with an empty particle set");
    const PomcpConfig cfg = resolve_pomcp_config(eq, config);
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();

    Search search(eq, cfg, rng);
    long sims = 0;
    for (;;) {
        if (cfg.simulations > 0 && sims >= cfg.simulations) break;
        if (cfg.seconds) {
            const std::chrono::duration<double> elapsed = Clock::now() - start;
            if (elapsed.count() >= *cfg.seconds) break;
        }
        search.simulate_from(particles[rng.below(particles.size())]);
        ++sims;
    }

    PomcpResult result{eq.legal_actions(particles.front()).front(), sims, {}};
    long best = -1;
    for (const auto& an : search.root().actions) {
        result.visit_counts.emplace_back(an.action, an.visits);
        if (an.visits > best) {
            best = an.visits;
            result.action = an.action;
        }
    }
    return result;
}

ParticleFilter ParticleFilter::from_belief(const Belief& b, int count, Rng& rng) {
    std::vector<StateId> particles(count);
    for (auto& p : particles) p = sample_state(b, rng);
    return ParticleFilter(std::move(particles));
}

void ParticleFilter::update(const PomdpModel& model, ActionId a, ObsId o, int count, Rng& rng) {
    std::vector<StateId> next;
    next.reserve(count);
    const long max_attempts = 20L * count;
    for (long attempt = 0; attempt < max_attempts && static_cast<int>(next.size()) < count; ++attempt) {
        const StateId s = particles_[rng.below(particles_.size())];
        const auto trans = model.transitions(s, a);
        const StateId s2 = trans[rng.categorical(trans, [](const SparseEntry& e) { return e.prob; })].index;
        const auto obs = model.observations(s2, a);
        const ObsId o2 = obs[rng.categorical(obs, [](const SparseEntry& e) { return e.prob; })].index;
        if (o2 == o) next.push_back(s2);
    }
    if (next.empty()) throw ParticleDepletion("no particle is consistent with the observation");
    particles_ = std::move(next);
}

}  // namespace pomdpsr
