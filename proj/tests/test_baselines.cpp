#include <cmath>
#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "oracle/exact_vi.hpp"
#include "pomdpsr/bounds.hpp"
#include "pomdpsr/envs.hpp"
#include "pomdpsr/equivalent.hpp"
#include "pomdpsr/planner.hpp"
#include "pomdpsr/pomcp.hpp"

using namespace pomdpsr;

namespace {

/// State 0 pays 1 for arm 0 and 0 for arm 1, then moves to an absorbing zero-reward state.
PomdpSr bandit() {
    PomdpModel::Builder b(2, 2, 1, 0.9);
    for (ActionId a = 0; a < 2; ++a) {
        b.transition(0, a, 1, 1.0).transition(1, a, 1, 1.0);
        b.observation(0, a, 0, 1.0).observation(1, a, 0, 1.0);
    }
    b.reward(0, 0, 1.0);
    return PomdpSr(b.build(), 0.5);
}

}  // namespace

TEST_CASE("POMCP with a single environmental action returns it") {
    PomdpModel::Builder b(2, 1, 1, 0.9);
    b.transition(0, 0, 1, 1.0).transition(1, 0, 0, 1.0);
    b.observation(0, 0, 0, 1.0).observation(1, 0, 0, 1.0);
    b.reward(0, 0, 1.0);
    const EquivalentPomdp eq = to_equivalent_pomdp(PomdpSr(b.build(), 0.1));
    for (long sims : {1L, 10L, 500L}) {
        PomcpConfig c;
        c.simulations = sims;
        Rng rng(1, 3);
        const std::vector<StateId> particles(20, eq.action_state(0));
        CHECK(pomcp_plan_step(eq, particles, c, rng).action == 0);
    }
}

TEST_CASE("POMCP picks the better bandit arm") {
    const EquivalentPomdp eq = to_equivalent_pomdp(bandit());
    PomcpConfig c;
    c.simulations = 10000;
    c.rollout_depth = 10;
    int good = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        Rng rng(static_cast<std::uint64_t>(t), 3);
        const std::vector<StateId> particles(50, eq.action_state(0));
        const PomcpResult r = pomcp_plan_step(eq, particles, c, rng);
        if (r.action == 0) ++good;
        CHECK(r.simulations == c.simulations);
    }
    CHECK(good >= 99);
}

TEST_CASE("POMCP at a decision state chooses between request and no-request") {
    const EquivalentPomdp eq = to_equivalent_pomdp(fib_counterexample(0.1));
    PomcpConfig c;
    c.simulations = 2000;
    Rng rng(5, 3);
    const std::vector<StateId> particles{eq.decision_state(0), eq.decision_state(1)};
    const PomcpResult r = pomcp_plan_step(eq, particles, c, rng);
    CHECK((r.action == eq.request_action() || r.action == eq.no_request_action()));
    long total = 0;
    for (const auto& [a, n] : r.visit_counts) total += n;
    // The first simulation only creates the root.
    CHECK(total == r.simulations - 1);
}

TEST_CASE("POMCP is deterministic for a fixed stream") {
    const PomdpSr p = testing::random_problem(31, 4, 3, 2);
    const EquivalentPomdp eq = to_equivalent_pomdp(p);
    PomcpConfig c;
    c.simulations = 3000;
    std::vector<StateId> particles;
    for (StateId s = 0; s < 4; ++s) particles.push_back(eq.decision_state(s));
    Rng r1(9, 3), r2(9, 3);
    const PomcpResult a = pomcp_plan_step(eq, particles, c, r1);
    const PomcpResult b = pomcp_plan_step(eq, particles, c, r2);
    CHECK(a.action == b.action);
    CHECK(a.visit_counts == b.visit_counts);
}

TEST_CASE("POMCP config defaults") {
    const EquivalentPomdp eq = to_equivalent_pomdp(fib_counterexample(0.1));
    const PomcpConfig c = resolve_pomcp_config(eq, {});
    REQUIRE(c.uct_c.has_value());
    REQUIRE(c.rollout_depth.has_value());
    CHECK(*c.uct_c > 0.0);
    const double g = std::sqrt(0.95);
    CHECK(*c.rollout_depth == static_cast<int>(std::ceil(std::log(1e-3) / std::log(g))));
    CHECK(c.num_particles == 1000);
    Rng rng(1);
    CHECK_THROWS_AS(pomcp_plan_step(eq, {}, c, rng), ParticleDepletion);
}

TEST_CASE("particle filter") {
    PomdpModel::Builder b(3, 1, 3, 0.9);
    for (StateId s = 0; s < 3; ++s) {
        b.transition(s, 0, (s + 1) % 3, 1.0);
        b.observation(s, 0, s, 1.0);
    }
    const PomdpModel m = b.build();
    Rng rng(2);
    ParticleFilter f = ParticleFilter::from_belief(Belief({{0, 0.5}, {1, 0.5}}), 200, rng);
    CHECK(f.particles().size() == 200);
    std::map<StateId, int> counts;
    for (StateId s : f.particles()) ++counts[s];
    CHECK(counts.size() == 2);
    CHECK(counts[0] > 60);
    CHECK(counts[1] > 60);

    f.update(m, 0, 2, 100, rng);
    CHECK(f.particles().size() == 100);
    for (StateId s : f.particles()) CHECK(s == 2);
    CHECK_THROWS_AS(f.update(m, 0, 1, 100, rng), ParticleDepletion);
}

TEST_CASE("AEMS and AEMS-SR reach the same epsilon-optimal root value") {
    const PomdpSr p = testing::random_problem(650, 3, 2, 2, 0.5, 0.02);
    const auto exact = oracle::solve_sr(p);
    const SolverOptions tight{.tol = 1e-10};
    const AlphaVectorSet lo = blind_lower_bound(p.model, tight);
    const AlphaVectorSet up = fib_sr(p, tight);
    const Belief b0 = testing::uniform_belief(3);
    PlannerOptions o;
    o.budget = Budget::expansions(1500);
    const Decision graph = plan_step(p, lo, up, b0, o);
    const Decision tree = aems_plan_step(p, lo, up, b0, o);
    REQUIRE(graph.stats.solved);
    if (tree.stats.solved) CHECK(std::abs(graph.stats.root_lower - tree.stats.root_lower) <= 2 * o.epsilon);
    CHECK(tree.stats.root_lower <= exact.decision.value(b0) + 1e-6);
}
