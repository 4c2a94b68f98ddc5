#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pomdpsr/errors.hpp"

namespace pomdpsr {

using StateId = int;
using ActionId = int;
using ObsId = int;

/// Tolerance used when validating that probability rows sum to one.
inline constexpr double kRowSumTolerance = 1e-9;
/// Belief entries below this mass are dropped before renormalization.
inline constexpr double kBeliefPruneThreshold = 1e-12;

/// One entry of a sparse probability row.
struct SparseEntry {
    int index;
    double prob;
};

/**
 * Immutable discrete POMDP.
 *
 * Transitions are stored as sparse rows keyed by (s, a), observations as sparse
 * rows keyed by (s', a); rewards are a dense |S| x |A| table. Construct through
 * PomdpModel::Builder, which validates every row on build().
 */
class PomdpModel {
  public:
    class Builder;

    int num_states() const noexcept { return num_states_; }
    int num_actions() const noexcept { return num_actions_; }
    int num_observations() const noexcept { return num_observations_; }
    double discount() const noexcept { return discount_; }

    std::span<const SparseEntry> transitions(StateId s, ActionId a) const {
        const auto row = static_cast<std::size_t>(s) * num_actions_ + a;
        return {trans_entries_.data() + trans_offsets_[row], trans_offsets_[row + 1] - trans_offsets_[row]};
    }
    std::span<const SparseEntry> observations(StateId next, ActionId a) const {
        const auto row = static_cast<std::size_t>(next) * num_actions_ + a;
        return {obs_entries_.data() + obs_offsets_[row], obs_offsets_[row + 1] - obs_offsets_[row]};
    }
    double reward(StateId s, ActionId a) const {
        return rewards_[static_cast<std::size_t>(s) * num_actions_ + a];
    }

    /// Absorbing zero-reward states that end an episode when entered.
    bool is_terminal(StateId s) const { return terminal_[s] != 0; }
    bool has_terminal_states() const noexcept { return has_terminal_; }

    double min_reward() const noexcept { return min_reward_; }
    double max_reward() const noexcept { return max_reward_; }

    /// Dense T(s'|s,a), mostly useful for tests and small models.
    double transition_prob(StateId s, ActionId a, StateId next) const;
    double observation_prob(StateId next, ActionId a, ObsId o) const;

  private:
    PomdpModel() = default;

    int num_states_ = 0;
    int num_actions_ = 0;
    int num_observations_ = 0;
    double discount_ = 0.0;
    double min_reward_ = 0.0;
    double max_reward_ = 0.0;
    bool has_terminal_ = false;

    std::vector<std::size_t> trans_offsets_;
    std::vector<SparseEntry> trans_entries_;
    std::vector<std::size_t> obs_offsets_;
    std::vector<SparseEntry> obs_entries_;
    std::vector<double> rewards_;
    std::vector<std::uint8_t> terminal_;
};

class PomdpModel::Builder {
  public:
    Builder(int num_states, int num_actions, int num_observations, double discount);

    /// Entries for the same (s, a, s') are accumulated.
    Builder& transition(StateId s, ActionId a, StateId next, double p);
    Builder& observation(StateId next, ActionId a, ObsId o, double p);
    Builder& reward(StateId s, ActionId a, double r);
    Builder& terminal(StateId s);

    /// Validates dimensions and row sums; throws ModelError on violation.
    PomdpModel build() const;

  private:
    struct Triplet {
        int row;
        int col;
        double p;
    };

    int num_states_;
    int num_actions_;
    int num_observations_;
    double discount_;
    std::vector<Triplet> transitions_;
    std::vector<Triplet> observations_;
    std::vector<double> rewards_;
    std::vector<std::uint8_t> terminal_;
};

/// A POMDP where, before every environmental action, the agent may pay
/// request_cost to observe the true state.
struct PomdpSr {
    PomdpModel model;
    double request_cost;

    PomdpSr(PomdpModel m, double cost);
};

enum class Phase : std::uint8_t {
    RequestDecision,  ///< before deciding whether to request the state
    EnvAction,        ///< before picking the environmental action
};

/**
 * Sparse probability vector over states.
 *
 * Entries are kept sorted by state, strictly positive and summing to one.
 */
class Belief {
  public:
    using Entry = std::pair<StateId, double>;

    Belief() = default;
    /// Normalizes, merges duplicate states and drops entries below kBeliefPruneThreshold.
    explicit Belief(std::vector<Entry> entries, Phase phase = Phase::RequestDecision);

    static Belief uniform(std::span<const StateId> states, Phase phase = Phase::RequestDecision);

    std::span<const Entry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    Phase phase() const noexcept { return phase_; }
    double operator[](StateId s) const;
    std::vector<StateId> support() const;
    bool is_corner() const noexcept { return entries_.size() == 1; }

    Belief with_phase(Phase phase) const {
        Belief b = *this;
        b.phase_ = phase;
        return b;
    }

    friend bool operator==(const Belief& lhs, const Belief& rhs) {
        if (lhs.phase_ != rhs.phase_ || lhs.entries_.size() != rhs.entries_.size()) return false;
        for (std::size_t i = 0; i < lhs.entries_.size(); ++i) {
            if (lhs.entries_[i].first != rhs.entries_[i].first || lhs.entries_[i].second != rhs.entries_[i].second)
                return false;
        }
        return true;
    }

  private:
    struct Trusted {};
    Belief(std::vector<Entry> entries, Phase phase, Trusted) : entries_(std::move(entries)), phase_(phase) {}

    friend class BeliefUpdater;

    std::vector<Entry> entries_;
    Phase phase_ = Phase::RequestDecision;
};

Belief corner_belief(StateId s, Phase phase = Phase::RequestDecision);

/// P(o | b, a) for every o; sums to one.
std::vector<double> obs_distribution(const PomdpModel& model, const Belief& b, ActionId a);
double obs_probability(const PomdpModel& model, const Belief& b, ActionId a, ObsId o);

/// b'(s') proportional to sum_s b(s) T(s'|s,a) O(o|s',a). Throws ImpossibleObservation.
Belief belief_update(const PomdpModel& model, const Belief& b, ActionId a, ObsId o);

/// sum_s b(s) R(s,a)
double belief_reward(const PomdpModel& model, const Belief& b, ActionId a);

/// One observation branch of (b, a): its probability and the updated belief.
struct BeliefBranch {
    ObsId obs;
    double prob;
    Belief next;
};

/**
 * Computes every reachable successor of (b, a) in one pass.
 *
 * Holds dense scratch buffers sized |S| x |Omega| so repeated calls (as in
 * search-graph expansion) do not allocate per state.
 */
class BeliefUpdater {
  public:
    explicit BeliefUpdater(const PomdpModel& model);

    /// Branches are ordered by observation id; zero-probability observations are omitted.
    std::vector<BeliefBranch> successors(const Belief& b, ActionId a, Phase child_phase = Phase::RequestDecision);

  private:
    const PomdpModel* model_;
    std::vector<double> joint_;  // |Omega| x |S|
    std::vector<std::vector<StateId>> touched_;
    std::vector<double> obs_mass_;
};

}  // namespace pomdpsr
