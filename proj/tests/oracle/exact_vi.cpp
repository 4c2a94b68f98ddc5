#include "oracle/exact_vi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

using namespace pomdpsr;

namespace oracle {

double Pwlc::value(const Vec& b) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : vectors) {
        double x = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) x += b[i] * v[i];
        best = std::max(best, x);
    }
    return best;
}

double Pwlc::value(const Belief& b) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : vectors) {
        double x = 0.0;
        for (const auto& [s, p] : b.entries()) x += p * v[s];
        best = std::max(best, x);
    }
    return best;
}

Vec dense(const Belief& b, int num_states) {
    Vec out(num_states, 0.0);
    for (const auto& [s, p] : b.entries()) out[s] = p;
    return out;
}

namespace {

/// max c.x s.t. A x <= rhs, x >= 0, with rhs >= 0. Dense tableau, Bland's rule.
double simplex_max(const std::vector<Vec>& a, const Vec& rhs, const Vec& c) {
    const std::size_t m = a.size();
    const std::size_t n = c.size();
    const std::size_t cols = n + m + 1;
    std::vector<Vec> t(m + 1, Vec(cols, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
        t[i][n + i] = 1.0;
        t[i][cols - 1] = rhs[i];
    }
    for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

    for (int iter = 0; iter < 100000; ++iter) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j + 1 < cols; ++j) {
            if (t[m][j] < -1e-12) {
                enter = j;
                break;
            }
        }
        if (enter == cols) return t[m][cols - 1];
        std::size_t leave = m;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] > 1e-12) {
                const double r = t[i][cols - 1] / t[i][enter];
                if (r < best_ratio - 1e-15 || (std::abs(r - best_ratio) <= 1e-15 && basis[i] < basis[leave])) {
                    best_ratio = r;
                    leave = i;
                }
            }
        }
        if (leave == m) throw std::runtime_error("LP unbounded");
        const double pv = t[leave][enter];
        for (double& x : t[leave]) x /= pv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave || t[i][enter] == 0.0) continue;
            const double f = t[i][enter];
            for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }
    throw std::runtime_error("simplex iteration limit");
}

/// Largest margin by which w beats every vector of `others` at some belief.
double witness_margin(const Vec& w, const std::vector<const Vec*>& others) {
    if (others.empty()) return std::numeric_limits<double>::infinity();
    const std::size_t n = w.size();
    if (n == 1) {
        double margin = std::numeric_limits<double>::infinity();
        for (const Vec* u : others) margin = std::min(margin, w[0] - (*u)[0]);
        return margin;
    }
    // Variables b_0..b_{n-2}, delta' with b_{n-1} = 1 - sum and delta = delta' - big.
    double big = 1.0;
    for (const Vec* u : others) big = std::max(big, std::abs(w[n - 1] - (*u)[n - 1]) + 1.0);
    std::vector<Vec> a;
    Vec rhs;
    for (const Vec* u : others) {
        Vec row(n, 0.0);
        const double dn = w[n - 1] - (*u)[n - 1];
        for (std::size_t i = 0; i + 1 < n; ++i) row[i] = -((w[i] - (*u)[i]) - dn);
        row[n - 1] = 1.0;
        a.push_back(std::move(row));
        rhs.push_back(dn + big);
    }
    Vec simplex_row(n, 1.0);
    simplex_row[n - 1] = 0.0;
    a.push_back(std::move(simplex_row));
    rhs.push_back(1.0);
    Vec c(n, 0.0);
    c[n - 1] = 1.0;
    return simplex_max(a, rhs, c) - big;
}

bool dominated_by(const Vec& w, const Vec& u) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > u[i]) return false;
    }
    return true;
}

}  // namespace

std::vector<Vec> prune(std::vector<Vec> vectors, double margin) {
    std::vector<Vec> kept;
    for (auto& v : vectors) {
        bool drop = false;
        for (const auto& u : kept) {
            if (dominated_by(v, u)) {
                drop = true;
                break;
            }
        }
        if (drop) continue;
        kept.erase(std::remove_if(kept.begin(), kept.end(), [&](const Vec& u) { return dominated_by(u, v); }),
                   kept.end());
        kept.push_back(std::move(v));
    }

    std::vector<char> alive(kept.size(), 1);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        std::vector<const Vec*> others;
        for (std::size_t j = 0; j < kept.size(); ++j) {
            if (j != i && alive[j]) others.push_back(&kept[j]);
        }
        // A corner where the vector is strictly best needs no LP.
        bool witnessed = false;
        for (std::size_t s = 0; s < kept[i].size() && !witnessed; ++s) {
            double best_other = -std::numeric_limits<double>::infinity();
            for (const Vec* u : others) best_other = std::max(best_other, (*u)[s]);
            witnessed = kept[i][s] > best_other + margin;
        }
        if (!witnessed && witness_margin(kept[i], others) <= margin) alive[i] = 0;
    }
    std::vector<Vec> out;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (alive[i]) out.push_back(std::move(kept[i]));
    }
    return out;
}

namespace {

/**
 * Exact backup of `next` (vectors over dst states) into vectors over src states,
 * for the given actions: R(s,a) + discount * sum_o argmax projections, with
 * incremental pruning of the cross-sums.
 */
std::vector<Vec> backup(const PomdpModel& m, const std::vector<StateId>& src, const std::vector<ActionId>& actions,
                        const std::vector<StateId>& dst, const std::vector<Vec>& next, double discount) {
    const std::size_t ns = src.size();
    std::vector<int> dst_slot(m.num_states(), -1);
    for (std::size_t i = 0; i < dst.size(); ++i) dst_slot[dst[i]] = static_cast<int>(i);
    const int no = m.num_observations();

    std::vector<Vec> all;
    for (ActionId a : actions) {
        std::vector<Vec> acc{Vec(ns, 0.0)};
        for (std::size_t i = 0; i < ns; ++i) acc[0][i] = m.reward(src[i], a);
        for (ObsId o = 0; o < no; ++o) {
            std::vector<Vec> proj;
            bool reachable = false;
            for (const auto& alpha : next) {
                Vec g(ns, 0.0);
                for (std::size_t i = 0; i < ns; ++i) {
                    for (const auto& t : m.transitions(src[i], a)) {
                        const double po = m.observation_prob(t.index, a, o);
                        if (po == 0.0) continue;
                        const int slot = dst_slot[t.index];
                        if (slot < 0) throw std::logic_error("backup leaves the destination block");
                        g[i] += discount * t.prob * po * alpha[slot];
                        reachable = true;
                    }
                }
                proj.push_back(std::move(g));
            }
            if (!reachable) continue;
            proj = prune(std::move(proj));
            std::vector<Vec> sum;
            sum.reserve(acc.size() * proj.size());
            for (const auto& x : acc) {
                for (const auto& y : proj) {
                    Vec z(ns);
                    for (std::size_t i = 0; i < ns; ++i) z[i] = x[i] + y[i];
                    sum.push_back(std::move(z));
                }
            }
            acc = prune(std::move(sum));
        }
        for (auto& v : acc) all.push_back(std::move(v));
    }
    return prune(std::move(all));
}

std::vector<StateId> iota_states(int n, int offset = 0) {
    std::vector<StateId> out(n);
    for (int i = 0; i < n; ++i) out[i] = offset + i;
    return out;
}

int iterations_for(double gamma, double scale, double target) {
    if (scale <= 0.0) return 1;
    return std::max(1, static_cast<int>(std::ceil(std::log(target * (1.0 - gamma) / scale) / std::log(gamma))));
}

double reward_scale(const PomdpModel& m) { return std::max(std::abs(m.min_reward()), std::abs(m.max_reward())); }

}  // namespace

SrSolution solve_sr(const PomdpSr& p, double target_error) {
    const PomdpModel& m = p.model;
    const int ns = m.num_states();
    const auto states = iota_states(ns);
    std::vector<ActionId> actions(m.num_actions());
    for (ActionId a = 0; a < m.num_actions(); ++a) actions[a] = a;

    SrSolution sol;
    sol.iterations = iterations_for(m.discount(), reward_scale(m), target_error);
    std::vector<Vec> decision{Vec(ns, 0.0)};
    std::vector<Vec> env;
    for (int it = 0; it < sol.iterations; ++it) {
        env = backup(m, states, actions, states, decision, m.discount());
        Vec req(ns, -std::numeric_limits<double>::infinity());
        for (const auto& v : env)
            for (int s = 0; s < ns; ++s) req[s] = std::max(req[s], v[s]);
        for (double& x : req) x -= p.request_cost;
        std::vector<Vec> next = env;
        next.push_back(std::move(req));
        decision = prune(std::move(next));
    }
    sol.decision.vectors = decision;
    sol.action.vectors = env;
    sol.error_bound = std::pow(m.discount(), sol.iterations) * reward_scale(m) / (1.0 - m.discount());
    return sol;
}

Pwlc solve_plain(const PomdpModel& m, double target_error) {
    const int ns = m.num_states();
    const auto states = iota_states(ns);
    std::vector<ActionId> actions(m.num_actions());
    for (ActionId a = 0; a < m.num_actions(); ++a) actions[a] = a;
    std::vector<Vec> v{Vec(ns, 0.0)};
    const int iterations = iterations_for(m.discount(), reward_scale(m), target_error);
    for (int it = 0; it < iterations; ++it) v = backup(m, states, actions, states, v, m.discount());
    return Pwlc{v};
}

EquivalentSolution solve_equivalent(const EquivalentPomdp& eq, double target_error) {
    const PomdpModel& m = eq.model();
    const int ns = eq.original_states();
    const auto phase0 = iota_states(ns);
    const auto phase1 = iota_states(ns, ns);
    const std::vector<ActionId> decision_actions{eq.request_action(), eq.no_request_action()};
    std::vector<ActionId> env_actions(eq.original_actions());
    for (ActionId a = 0; a < eq.original_actions(); ++a) env_actions[a] = a;

    // One loop covers two equivalent steps, i.e. one factor of the original discount.
    const double g = m.discount();
    const int iterations = iterations_for(g * g, reward_scale(m), target_error * (1.0 - g) / (1.0 - g * g)) + 1;
    std::vector<Vec> decision{Vec(ns, 0.0)};
    std::vector<Vec> action;
    for (int it = 0; it < iterations; ++it) {
        action = backup(m, phase1, env_actions, phase0, decision, m.discount());
        decision = backup(m, phase0, decision_actions, phase1, action, m.discount());
    }
    return EquivalentSolution{Pwlc{decision}, Pwlc{action}};
}

}  // namespace oracle
