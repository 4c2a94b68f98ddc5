#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pomdpsr/model.hpp"
#include "pomdpsr/planner.hpp"
#include "pomdpsr/rng.hpp"

namespace pomdpsr {

/// A benchmark problem together with how episodes start.
struct Environment {
    std::string name;
    PomdpSr problem;
    /// Distribution initial states are drawn from.
    Belief initial_state_distribution;
    /// Agent's initial belief given the true initial state; null means initial_state_distribution.
    std::function<Belief(StateId)> initial_belief_for;
    /// Reward received on a sampled transition (s, a, s'); null means the expected R(s,a).
    std::function<double(StateId, ActionId, StateId)> realized_reward;

    Belief initial_belief(StateId s) const {
        return initial_belief_for ? initial_belief_for(s) : initial_state_distribution;
    }
};

// --- RobotDelivery --------------------------------------------------------

struct RobotDeliveryParams {
    int n = 3;
    double f = 0.1;        ///< movement failure probability
    double t = 0.8;        ///< waiting-to-pickup transfer probability
    double e = 1.0 / 3.0;  ///< probability that no further package spawns after a delivery
    double discount = 0.99;
    double request_cost = 0.1;
    double exit_reward = 1.0;
    double delivery_reward = 1.0;
};

/**
 * Grid geometry of RobotDelivery(n).
 *
 * Main room: 3 rows x (2n-1) columns. Corridor i (two cells, the far one holds
 * pickup point i) rises from the top row at column 2i. The delivery cell D sits
 * below the bottom row at column n-1. The exit E lies left of the middle row's
 * first cell; stepping into it ends the episode. The agent starts in the centre
 * of the room, directly above D.
 */
class RobotDeliveryLayout {
  public:
    enum Action : ActionId { Up = 0, Down = 1, Left = 2, Right = 3 };
    static constexpr ObsId kSpecialObservation = 4;

    explicit RobotDeliveryLayout(int n);

    int n() const noexcept { return n_; }
    int num_positions() const noexcept { return static_cast<int>(cells_.size()); }
    int num_statuses() const noexcept { return n_ + 3; }
    int num_states() const noexcept { return num_positions() * num_statuses() + 1; }

    // Status ids: 0..n-1 package at pickup i, then waiting, carried, none.
    int waiting() const noexcept { return n_; }
    int carried() const noexcept { return n_ + 1; }
    int none() const noexcept { return n_ + 2; }

    StateId state(int position, int status) const { return position * num_statuses() + status; }
    StateId terminal() const noexcept { return num_states() - 1; }
    int position_of(StateId s) const { return s / num_statuses(); }
    int status_of(StateId s) const { return s % num_statuses(); }

    int room(int row, int col) const { return row * width_ + col; }
    int corridor(int i) const { return 3 * width_ + 2 * i; }
    int pickup(int i) const { return 3 * width_ + 2 * i + 1; }
    int delivery() const { return 3 * width_ + 2 * n_; }
    int start() const { return room(1, n_ - 1); }

    /// Neighbor position after moving, -1 for a wall, -2 for the exit.
    int move(int position, ActionId a) const;
    int wall_count(int position) const;
    /// Pickup index of a pickup cell, or -1.
    int pickup_index(int position) const;

    std::string ascii_map() const;
    std::string state_legend() const;

  private:
    struct Cell {
        int row;
        int col;
    };
    int find(int row, int col) const;

    int n_;
    int width_;
    std::vector<Cell> cells_;
};

PomdpSr robot_delivery(const RobotDeliveryParams& params);
Environment robot_delivery_env(const RobotDeliveryParams& params);

// --- Tag ------------------------------------------------------------------

struct TagParams {
    double discount = 0.95;
    double prey_stay_probability = 0.2;
    double request_cost = 0.1;
};

/// 29-cell Tag map: a 10x2 base with a 3x3 block above columns 5-7.
class TagLayout {
  public:
    enum Action : ActionId { North = 0, South = 1, East = 2, West = 3, Tag = 4 };
    static constexpr int kCells = 29;
    static constexpr ObsId kSameTileObservation = 29;

    TagLayout();

    int x(int cell) const { return coords_[cell].first; }
    int y(int cell) const { return coords_[cell].second; }
    /// Neighbor cell in direction a (0-3), or the cell itself when blocked.
    int neighbor(int cell, ActionId a) const { return neighbors_[cell][a]; }
    int distance(int a, int b) const;

    StateId state(int agent, int prey) const { return agent * kCells + prey; }
    StateId terminal() const noexcept { return kCells * kCells; }
    int agent_of(StateId s) const { return s / kCells; }
    int prey_of(StateId s) const { return s % kCells; }

    /// Prey's next-cell distribution given its cell and the agent's cell.
    std::vector<std::pair<int, double>> prey_moves(int prey, int agent, double stay) const;

  private:
    std::vector<std::pair<int, int>> coords_;
    std::vector<std::array<int, 4>> neighbors_;
};

PomdpModel tag(const TagParams& params = {});
Environment tag_env(const TagParams& params = {});

// --- Small models ---------------------------------------------------------

/// Two states, uniform transitions, one observation, rewards +1 on the diagonal and -1 off it.
PomdpSr fib_counterexample(double request_cost, double discount = 0.95);
Environment fib_counterexample_env(double request_cost, double discount = 0.95);

struct RandomModelSpec {
    int num_states = 4;
    int num_actions = 2;
    int num_observations = 2;
    double discount = 0.9;
    double request_cost = 0.1;
    /// Maximum nonzeros per transition and observation row; 0 means dense.
    int transition_support = 0;
    int observation_support = 0;
};

PomdpSr random_pomdp_sr(const RandomModelSpec& spec, Rng& rng);

// --- Episode engine -------------------------------------------------------

struct StepOutcome {
    StateId next_state;
    ObsId observation;
    double reward;  ///< R(s,a) - c * [request]
    std::optional<StateId> revealed;
    ActionId action;
    bool done;
};

StateId sample_state(const Belief& b, Rng& rng);

/// Samples s' ~ T(.|s,a) and o ~ O(.|s',a) for the decision's action at s.
StepOutcome simulate(const PomdpSr& p, StateId s, const Decision& decision, Rng& rng);

/// Same as above, but reports the environment's realized reward when it has one.
StepOutcome simulate(const Environment& env, StateId s, const Decision& decision, Rng& rng);

}  // namespace pomdpsr
