#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "oracle/paths.hpp"
#include "pomdpsr/bounds.hpp"
#include "pomdpsr/envs.hpp"
#include "pomdpsr/linalg.hpp"
#include "pomdpsr/psi.hpp"

using namespace pomdpsr;

namespace {

DenseMatrix random_substochastic(std::size_t k, double gamma, Rng& rng) {
    DenseMatrix m(k);
    for (std::size_t i = 0; i < k; ++i) {
        double total = 0.0;
        std::vector<double> row(k);
        for (double& x : row) total += (x = rng.uniform() < 0.4 ? 0.0 : rng.uniform());
        const double mass = gamma * rng.uniform();
        for (std::size_t j = 0; j < k; ++j) m(i, j) = total > 0 ? mass * row[j] / total : 0.0;
    }
    return m;
}

/// psi = sum_k (psi_bar^T)^k root, truncated.
std::vector<double> neumann(const DenseMatrix& psi_bar, const std::vector<double>& root, int terms) {
    const std::size_t k = root.size();
    std::vector<double> term = root;
    std::vector<double> sum = root;
    for (int t = 1; t <= terms; ++t) {
        std::vector<double> next(k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) next[j] += psi_bar(i, j) * term[i];
        }
        term = next;
        for (std::size_t j = 0; j < k; ++j) sum[j] += term[j];
    }
    return sum;
}

std::vector<NodeId> fringes_of(const SearchGraph& g) {
    std::vector<NodeId> out;
    for (NodeId n = 0; n < static_cast<NodeId>(g.node_count()); ++n) {
        if (g.node(n).is_fringe()) out.push_back(n);
    }
    return out;
}

/// Expands `steps` randomly chosen fringes, updating bounds after each.
void scripted_expansions(SearchGraph& g, int steps, Rng& rng) {
    for (int i = 0; i < steps; ++i) {
        const auto f = fringes_of(g);
        const NodeId n = f[rng.below(f.size())];
        g.expand(n);
        g.update_ancestors(n);
    }
}

}  // namespace

TEST_CASE("LU solve") {
    DenseMatrix a(3);
    const double v[3][3] = {{0.0, 2.0, 1.0}, {1.0, 1.0, 0.0}, {3.0, 0.0, 1.0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = v[i][j];
    const auto x = lu_solve(a, {7.0, 3.0, 6.0});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
    CHECK(x[2] == doctest::Approx(3.0));

    DenseMatrix s(2);
    s(0, 0) = 1.0;
    s(0, 1) = 2.0;
    s(1, 0) = 2.0;
    s(1, 1) = 4.0;
    CHECK_THROWS_AS(lu_solve(s, {1.0, 1.0}), SingularSystem);
}

TEST_CASE("solve_psi closed forms") {
    SUBCASE("no corner-to-corner weight") {
        DenseMatrix z(3);
        const std::vector<double> root{0.2, 0.5, 0.3};
        CHECK(solve_psi(z, root) == root);
    }
    SUBCASE("self-loop") {
        DenseMatrix m(1);
        m(0, 0) = 0.5;
        CHECK(solve_psi(m, {0.3})[0] == doctest::Approx(0.6));
    }
    SUBCASE("two corners, flow runs from the first to the second") {
        DenseMatrix m(2);
        m(0, 1) = 0.5;
        const auto psi = solve_psi(m, {1.0, 0.0});
        CHECK(psi[0] == doctest::Approx(1.0));
        CHECK(psi[1] == doctest::Approx(0.5));
    }
    SUBCASE("empty") { CHECK(solve_psi(DenseMatrix(0), {}).empty()); }
}

TEST_CASE("solve_psi matches the Neumann series on random substochastic systems") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 1 + rng.below(8);
        const DenseMatrix m = random_substochastic(k, 0.9, rng);
        std::vector<double> root(k);
        for (double& x : root) x = rng.uniform();
        const auto psi = solve_psi(m, root);
        const auto ref = neumann(m, root, 400);
        for (std::size_t i = 0; i < k; ++i) CHECK(std::abs(psi[i] - ref[i]) <= 1e-8);
    }
}

TEST_CASE("gwalk on a lone root") {
    const PomdpSr ce = fib_counterexample(0.1);
    const AlphaVectorSet lo = blind_lower_bound(ce.model);
    const AlphaVectorSet up = fib_sr(ce);
    SearchGraph g(ce, lo, up, Belief({{0, 0.5}, {1, 0.5}}));
    const WalkResult w = gwalk(g);
    CHECK(w.corners.empty());
    CHECK(w.psi_bar.size() == 0);
    REQUIRE(w.fringes.size() == 1);
    CHECK(w.fringes[0].node == g.root());
    CHECK(select_fringe(g).node == g.root());
}

TEST_CASE("gwalk after an immediate request") {
    const PomdpSr ce = fib_counterexample(0.1);
    const AlphaVectorSet lo = blind_lower_bound(ce.model);
    const AlphaVectorSet up = fib_sr(ce);
    SearchGraph g(ce, lo, up, Belief({{0, 0.4}, {1, 0.6}}));
    g.expand(g.root());
    g.update_ancestors(g.root());
    REQUIRE(g.greedy_action(g.root()) == kRequestAction);
    const WalkResult w = gwalk(g);
    REQUIRE(w.corners == std::vector<StateId>{0, 1});
    CHECK(w.psi_bar_root[0] == doctest::Approx(0.4));
    CHECK(w.psi_bar_root[1] == doctest::Approx(0.6));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(w.psi_bar(i, j) == 0.0);
    for (const auto& f : w.fringes) {
        CHECK(f.origin >= 0);
        CHECK(f.weight == doctest::Approx(0.95));
    }
}

TEST_CASE("corner cycle weight matches path enumeration") {
    const PomdpSr ce = fib_counterexample(0.1, 0.6);
    const AlphaVectorSet lo = blind_lower_bound(ce.model);
    const AlphaVectorSet up = fib_sr(ce);
    SearchGraph g(ce, lo, up, Belief({{0, 0.5}, {1, 0.5}}));
    g.expand(g.root());
    g.update_ancestors(g.root());
    REQUIRE(g.greedy_action(g.root()) == kRequestAction);
    // Expand the fringe under corner 0's greedy action: it requests back into both corners.
    const NodeId c0 = g.corner(0);
    const ActionEdge& e = g.node(c0).edges[g.greedy_edge(c0)];
    const NodeId f = e.branches.front().child;
    g.expand(f);
    g.update_ancestors(f);

    const PsiSolution sol = compute_psi(g);
    const int i0 = sol.walk.index_of(0);
    REQUIRE(i0 >= 0);
    CHECK(sol.walk.psi_bar(i0, i0) > 0.0);
    const auto corners = oracle::enumerate_corner_weights(g, oracle::greedy_policy(), 1e-13);
    for (std::size_t i = 0; i < sol.walk.corners.size(); ++i) {
        CHECK(std::abs(sol.psi_root[i] - corners.at(sol.walk.corners[i])) <= 1e-9);
    }
}

TEST_CASE("fringe scores match exhaustive path enumeration on scripted graphs") {
    Rng rng(7);
    int graphs = 0;
    for (std::uint64_t seed = 0; graphs < 20; ++seed) {
        const PomdpSr p = testing::random_problem(200 + seed, 3, 2, 2, 0.5, 0.02);
        const AlphaVectorSet lo = blind_lower_bound(p.model);
        const AlphaVectorSet up = fib_sr(p);
        SearchGraph g(p, lo, up, testing::uniform_belief(3));
        scripted_expansions(g, 2 + static_cast<int>(rng.below(6)), rng);
        const PsiSolution sol = compute_psi(g);
        const auto weights = oracle::enumerate_fringe_weights(g, oracle::greedy_policy(), 1e-10);
        CHECK(weights.size() <= sol.walk.fringes.size());
        for (std::size_t i = 0; i < sol.walk.fringes.size(); ++i) {
            const auto& f = sol.walk.fringes[i];
            REQUIRE(weights.count(f.node) == 1);
            const double expect = weights.at(f.node) * g.node(f.node).offline_gap();
            CHECK(std::abs(sol.fringe_scores[i] - expect) <= 1e-8 * std::max(1.0, std::abs(expect)));
        }
        if (!sol.walk.corners.empty()) ++graphs;
    }
}

TEST_CASE("walk invariants and the restricted solve") {
    Rng rng(19);
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const PomdpSr p = testing::random_problem(300 + seed, 5, 2, 2, 0.8, 0.01);
        const AlphaVectorSet lo = blind_lower_bound(p.model);
        const AlphaVectorSet up = fib_sr(p);
        SearchGraph g(p, lo, up, testing::uniform_belief(5));
        scripted_expansions(g, 10, rng);
        const PsiSolution sol = compute_psi(g);
        const auto& w = sol.walk;
        const std::size_t k = w.corners.size();
        for (std::size_t i = 0; i < k; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                CHECK(w.psi_bar(i, j) >= 0.0);
                row += w.psi_bar(i, j);
            }
            CHECK(row <= 0.8 + 1e-9);
            CHECK(sol.psi_root[i] >= 0.0);
        }
        // Residual of psi = root + psi_bar^T psi.
        for (std::size_t j = 0; j < k; ++j) {
            double r = w.psi_bar_root[j] - sol.psi_root[j];
            for (std::size_t i = 0; i < k; ++i) r += w.psi_bar(i, j) * sol.psi_root[i];
            CHECK(std::abs(r) <= 1e-10);
        }
        // Same system over every state, indexed by state id.
        const int n = p.model.num_states();
        DenseMatrix full(n);
        std::vector<double> root(n, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            root[w.corners[i]] = w.psi_bar_root[i];
            for (std::size_t j = 0; j < k; ++j) full(w.corners[i], w.corners[j]) = w.psi_bar(i, j);
        }
        const auto dense = solve_psi(full, root);
        for (std::size_t i = 0; i < k; ++i) CHECK(std::abs(dense[w.corners[i]] - sol.psi_root[i]) <= 1e-10);
    }
}

TEST_CASE("fringe scores never exceed the discounted largest gap") {
    Rng rng(23);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const PomdpSr p = testing::random_problem(400 + seed, 4, 2, 2, 0.7, 0.05);
        const AlphaVectorSet lo = blind_lower_bound(p.model);
        const AlphaVectorSet up = fib_sr(p);
        SearchGraph g(p, lo, up, testing::uniform_belief(4));
        scripted_expansions(g, 8, rng);
        double max_gap = 0.0;
        for (NodeId n = 0; n < static_cast<NodeId>(g.node_count()); ++n) {
            if (g.node(n).is_fringe()) max_gap = std::max(max_gap, g.node(n).offline_gap());
        }
        const PsiSolution sol = compute_psi(g);
        for (std::size_t i = 0; i < sol.walk.fringes.size(); ++i) {
            // Every fringe lies at least one environmental step below the root.
            CHECK(sol.fringe_scores[i] <= 0.7 / (1.0 - 0.7) * max_gap + 1e-9);
        }
    }
}

TEST_CASE("select_fringe picks the best score and falls back when the walk finds none") {
    Rng rng(3);
    const PomdpSr p = testing::random_problem(500, 3, 2, 2, 0.6, 0.05);
    const AlphaVectorSet lo = blind_lower_bound(p.model);
    const AlphaVectorSet up = fib_sr(p);
    SearchGraph g(p, lo, up, testing::uniform_belief(3));
    scripted_expansions(g, 5, rng);
    const PsiSolution sol = compute_psi(g);
    const FringeChoice c = select_fringe(g);
    for (double s : sol.fringe_scores) CHECK(s <= c.score);
    const FringeChoice any = select_any_fringe(g);
    CHECK(g.node(any.node).is_fringe());
}
