#include <cmath>
#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "pomdpsr/bounds.hpp"
#include "pomdpsr/envs.hpp"

using namespace pomdpsr;

namespace {

Decision act(ActionId a) {
    Decision d;
    d.action = a;
    return d;
}

Decision request_then(ActionId a, int num_states) {
    Decision d;
    d.request = true;
    for (StateId s = 0; s < num_states; ++s) d.action_by_state.emplace_back(s, a);
    return d;
}

}  // namespace

TEST_CASE("RobotDelivery sizes") {
    const std::map<int, int> expected{{3, 133}, {5, 305}, {7, 541}};
    for (const auto& [n, count] : expected) {
        RobotDeliveryParams prm;
        prm.n = n;
        const PomdpSr p = robot_delivery(prm);
        CHECK(p.model.num_states() == count);
        CHECK(p.model.num_states() == (8 * n - 2) * (n + 3) + 1);
        CHECK(p.model.num_actions() == 4);
        CHECK(p.model.num_observations() == 5);
        CHECK(RobotDeliveryLayout(n).num_positions() == 8 * n - 2);
    }
    for (int n = 1; n <= 9; ++n) {
        RobotDeliveryParams prm;
        prm.n = n;
        CHECK(robot_delivery(prm).model.num_states() == (8 * n - 2) * (n + 3) + 1);
    }
}

TEST_CASE("RobotDelivery parameter validation") {
    RobotDeliveryParams prm;
    prm.f = 1.0;
    CHECK_THROWS_AS(robot_delivery(prm), ModelError);
    prm = {};
    prm.t = 0.0;
    CHECK_THROWS_AS(robot_delivery(prm), ModelError);
    prm = {};
    prm.e = 0.0;
    CHECK_THROWS_AS(robot_delivery(prm), ModelError);
    CHECK_THROWS_AS(RobotDeliveryLayout(0), ModelError);
}

TEST_CASE("RobotDelivery geometry") {
    const RobotDeliveryLayout L(3);
    using A = RobotDeliveryLayout::Action;
    const int a = L.start();
    CHECK(L.move(a, A::Down) == L.room(2, 2));
    CHECK(L.move(L.room(2, 2), A::Down) == L.delivery());
    CHECK(L.move(L.room(1, 0), A::Left) == -2);
    CHECK(L.move(L.room(0, 0), A::Up) == L.corridor(0));
    CHECK(L.move(L.corridor(0), A::Up) == L.pickup(0));
    CHECK(L.move(L.room(0, 1), A::Up) == -1);
    CHECK(L.pickup_index(L.pickup(2)) == 2);
    CHECK(L.pickup_index(L.corridor(2)) == -1);
    CHECK(L.wall_count(L.pickup(1)) == 3);
    CHECK(L.wall_count(L.corridor(1)) == 2);
    CHECK(L.wall_count(L.room(1, 2)) == 0);
    CHECK(L.wall_count(L.room(1, 0)) == 0);
    CHECK(L.wall_count(L.room(0, 1)) == 1);
    CHECK(L.wall_count(L.delivery()) == 3);
    const std::string map = L.ascii_map();
    CHECK(map.find('A') != std::string::npos);
    CHECK(map.find('D') != std::string::npos);
    CHECK(map.find('E') != std::string::npos);
    const std::string legend = L.state_legend();
    CHECK(std::count(legend.begin(), legend.end(), '\n') == 133 + 1);
}

TEST_CASE("RobotDelivery exit value under reliable movement") {
    for (int n : {3, 5, 7}) {
        RobotDeliveryParams prm;
        prm.n = n;
        prm.f = 0.0;
        const RobotDeliveryLayout L(n);
        const PomdpSr p = robot_delivery(prm);
        const AlphaVectorSet q = qmdp(p.model, {.tol = 1e-12});
        // With no package left, exiting is the only reward: n moves left, paid on the last.
        const double v = evaluate(q, corner_belief(L.state(L.start(), L.none())));
        CHECK(v == doctest::Approx(std::pow(0.99, n - 1)).epsilon(1e-9));
    }
}

TEST_CASE("RobotDelivery pickup and delivery dynamics") {
    RobotDeliveryParams prm;
    const RobotDeliveryLayout L(3);
    const PomdpSr p = robot_delivery(prm);
    const PomdpModel& m = p.model;
    using A = RobotDeliveryLayout::Action;

    // Standing on pickup 1 with the package there: the next step carries it.
    const StateId at_pickup = L.state(L.pickup(1), 1);
    CHECK(m.transition_prob(at_pickup, A::Down, L.state(L.corridor(1), L.carried())) == doctest::Approx(1.0 - prm.f));
    CHECK(m.observation_prob(L.state(L.pickup(1), 1), A::Up, RobotDeliveryLayout::kSpecialObservation) == 1.0);

    // Moving into a pickup or the delivery cell never fails.
    CHECK(m.transition_prob(L.state(L.corridor(0), 2), A::Up, L.state(L.pickup(0), 2)) == 1.0);

    // Delivery pays 1 and respawns.
    const StateId carrying = L.state(L.room(2, 2), L.carried());
    CHECK(m.reward(carrying, A::Down) == 1.0);
    CHECK(m.transition_prob(carrying, A::Down, L.state(L.delivery(), L.none())) == doctest::Approx(prm.e));
    CHECK(m.transition_prob(carrying, A::Down, L.state(L.delivery(), L.waiting())) ==
          doctest::Approx((1.0 - prm.e) * (1.0 - prm.t)));
    CHECK(m.transition_prob(carrying, A::Down, L.state(L.delivery(), 0)) == doctest::Approx((1.0 - prm.e) * prm.t / 3));

    // Waiting packages move to a pickup with probability t.
    const StateId waiting = L.state(L.room(1, 1), L.waiting());
    CHECK(m.transition_prob(waiting, A::Up, L.state(L.room(0, 1), L.waiting())) ==
          doctest::Approx((1.0 - prm.f) * (1.0 - prm.t)));

    // Exit: expected reward 1-f, terminal with probability 1-f.
    const StateId by_exit = L.state(L.room(1, 0), L.none());
    CHECK(m.reward(by_exit, A::Left) == doctest::Approx(1.0 - prm.f));
    CHECK(m.transition_prob(by_exit, A::Left, L.terminal()) == doctest::Approx(1.0 - prm.f));
    CHECK(m.is_terminal(L.terminal()));
}

TEST_CASE("RobotDelivery realized reward pays the exit only on success") {
    RobotDeliveryParams prm;
    const RobotDeliveryLayout L(3);
    const Environment env = robot_delivery_env(prm);
    REQUIRE(env.realized_reward);
    const StateId by_exit = L.state(L.room(1, 0), L.none());
    CHECK(env.realized_reward(by_exit, RobotDeliveryLayout::Left, L.terminal()) == 1.0);
    CHECK(env.realized_reward(by_exit, RobotDeliveryLayout::Left, by_exit) == 0.0);
    const StateId carrying = L.state(L.room(2, 2), L.carried());
    CHECK(env.realized_reward(carrying, RobotDeliveryLayout::Down, L.state(L.delivery(), L.none())) == 1.0);
    CHECK(env.realized_reward(carrying, RobotDeliveryLayout::Up, L.state(L.room(1, 2), L.carried())) == 0.0);

    // Sampled rewards average to the model's expected reward.
    Rng rng(8);
    double total = 0.0;
    const int samples = 20000;
    for (int i = 0; i < samples; ++i) total += simulate(env, by_exit, act(RobotDeliveryLayout::Left), rng).reward;
    CHECK(std::abs(total / samples - 0.9) <= 3.0 * std::sqrt(0.09 / samples));

    const Belief b0 = env.initial_state_distribution;
    CHECK(b0.size() == 3);
    for (const auto& [s, w] : b0.entries()) {
        CHECK(L.position_of(s) == L.start());
        CHECK(w == doctest::Approx(1.0 / 3));
    }
}

TEST_CASE("Tag sizes and rewards") {
    const PomdpModel m = tag();
    CHECK(m.num_states() == 842);
    CHECK(m.num_observations() == 30);
    CHECK(m.num_actions() == 5);
    CHECK(m.discount() == 0.95);
    const TagLayout L;
    for (int c = 0; c < TagLayout::kCells; ++c) {
        const StateId same = L.state(c, c);
        CHECK(m.reward(same, TagLayout::Tag) == 10.0);
        CHECK(m.transition_prob(same, TagLayout::Tag, L.terminal()) == 1.0);
        CHECK(m.observation_prob(same, TagLayout::North, TagLayout::kSameTileObservation) == 1.0);
        const StateId apart = L.state(c, (c + 1) % TagLayout::kCells);
        CHECK(m.reward(apart, TagLayout::Tag) == -10.0);
        CHECK(m.reward(apart, TagLayout::East) == -1.0);
        CHECK(m.observation_prob(apart, TagLayout::East, c) == 1.0);
    }
}

TEST_CASE("Tag prey never moves closer") {
    const TagLayout L;
    int neighbors = 0;
    for (int c = 0; c < TagLayout::kCells; ++c)
        for (ActionId a = 0; a < 4; ++a) neighbors += L.neighbor(c, a) != c ? 1 : 0;
    CHECK(neighbors == 2 * (9 * 2 + 10 + 2 * 3 + 3 * 2 + 3));
    for (int agent = 0; agent < TagLayout::kCells; ++agent) {
        for (int prey = 0; prey < TagLayout::kCells; ++prey) {
            double total = 0.0;
            for (const auto& [cell, pr] : L.prey_moves(prey, agent, 0.2)) {
                total += pr;
                CHECK(L.distance(cell, agent) >= L.distance(prey, agent));
                CHECK(pr > 0.0);
            }
            CHECK(total == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("counterexample and random models are valid") {
    const PomdpSr ce = fib_counterexample(0.1);
    CHECK(ce.model.num_states() == 2);
    CHECK(ce.model.num_observations() == 1);
    CHECK(ce.model.transition_prob(0, 1, 1) == 0.5);
    CHECK(ce.model.reward(0, 0) == 1.0);
    CHECK(ce.model.reward(0, 1) == -1.0);
    CHECK(ce.model.reward(1, 1) == 1.0);
    CHECK(ce.model.discount() == 0.95);
    CHECK_THROWS_AS(fib_counterexample(0.0), ModelError);
    const PomdpSr r = testing::random_problem(1, 6, 3, 4, 0.9, 0.2);
    CHECK(r.model.num_states() == 6);
    CHECK(r.request_cost == 0.2);
}

TEST_CASE("simulate") {
    SUBCASE("deterministic model gives a deterministic trajectory") {
        PomdpModel::Builder b(3, 1, 3, 0.9);
        for (StateId s = 0; s < 3; ++s) {
            b.transition(s, 0, (s + 1) % 3, 1.0).observation(s, 0, s, 1.0).reward(s, 0, s);
        }
        const PomdpSr p(b.build(), 0.5);
        Rng rng(1);
        StateId s = 0;
        for (int t = 0; t < 6; ++t) {
            const StepOutcome out = simulate(p, s, act(0), rng);
            CHECK(out.next_state == (s + 1) % 3);
            CHECK(out.observation == out.next_state);
            CHECK(out.reward == s);
            CHECK_FALSE(out.revealed.has_value());
            s = out.next_state;
        }
    }
    SUBCASE("requests reveal the current state and cost c") {
        const PomdpSr p = testing::random_problem(4, 4, 2, 2, 0.9, 0.3);
        Rng rng(2);
        for (StateId s = 0; s < 4; ++s) {
            const StepOutcome out = simulate(p, s, request_then(1, 4), rng);
            REQUIRE(out.revealed.has_value());
            CHECK(*out.revealed == s);
            CHECK(out.action == 1);
            CHECK(out.reward == doctest::Approx(p.model.reward(s, 1) - 0.3));
        }
    }
    SUBCASE("transition frequencies match the model") {
        const PomdpSr p = testing::random_problem(5, 5, 2, 2);
        Rng rng(3);
        const int samples = 100000;
        std::vector<int> counts(5, 0);
        for (int i = 0; i < samples; ++i) ++counts[simulate(p, 2, act(1), rng).next_state];
        for (StateId s2 = 0; s2 < 5; ++s2) {
            const double q = p.model.transition_prob(2, 1, s2);
            const double sigma = std::sqrt(q * (1.0 - q) / samples);
            CHECK(std::abs(counts[s2] / static_cast<double>(samples) - q) <= 3.0 * sigma + 1e-12);
        }
    }
}
