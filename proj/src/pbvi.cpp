#include "pomdpsr/pbvi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pomdpsr/bounds.hpp"
#include "pomdpsr/envs.hpp"

namespace pomdpsr {

BeliefSet::BeliefSet(int num_states, const std::vector<Belief>& extra) {
    for (StateId s = 0; s < num_states; ++s) points_.push_back(corner_belief(s));
    for (const auto& b : extra) add(b);
}

BeliefSet BeliefSet::without_corners(const std::vector<Belief>& points) {
    BeliefSet set;
    for (const auto& b : points) set.add(b);
    return set;
}

bool BeliefSet::add(const Belief& b) {
    const Belief p = b.with_phase(Phase::RequestDecision);
    if (std::find(points_.begin(), points_.end(), p) != points_.end()) return false;
    points_.push_back(p);
    return true;
}

AlphaVectorSet pbvi_initial_set(const PomdpSr& p, PbviInit init) {
    if (init == PbviInit::Blind) return with_request_vector(blind_lower_bound(p.model), p.request_cost);
    AlphaVectorSet zero(BoundKind::Lower, {AlphaVector{std::vector<double>(p.model.num_states(), 0.0), 0}});
    return with_request_vector(zero, p.request_cost);
}

AlphaVectorSet pbvi_sr_backup(const PomdpSr& p, const BeliefSet& points, const AlphaVectorSet& gamma_prev,
                              Exec exec) {
    const PomdpModel& m = p.model;
    const int ns = m.num_states();
    const int na = m.num_actions();
    const int no = m.num_observations();
    const double gamma = m.discount();
    const auto& prev = gamma_prev.vectors();
    const std::size_t ng = prev.size();

    // proj[(a * |O| + o) * |G| + k](s) = sum_s' T(s'|s,a) O(o|s',a) alpha_k(s')
    std::vector<std::vector<double>> proj(static_cast<std::size_t>(na) * no * ng, std::vector<double>(ns, 0.0));
    for (StateId s = 0; s < ns; ++s) {
        for (ActionId a = 0; a < na; ++a) {
            for (const auto& t : m.transitions(s, a)) {
                for (const auto& o : m.observations(t.index, a)) {
                    const double w = t.prob * o.prob;
                    for (std::size_t k = 0; k < ng; ++k)
                        proj[(static_cast<std::size_t>(a) * no + o.index) * ng + k][s] += w * prev[k].values[t.index];
                }
            }
        }
    }

    const auto& pts = points.points();
    std::vector<AlphaVector> best(pts.size());
    parallel_max(static_cast<int>(pts.size()), exec, [&](int i) {
        const Belief& b = pts[i];
        double best_value = -std::numeric_limits<double>::infinity();
        for (ActionId a = 0; a < na; ++a) {
            std::vector<double> g(ns);
            for (StateId s = 0; s < ns; ++s) g[s] = m.reward(s, a);
            for (ObsId o = 0; o < no; ++o) {
                std::size_t arg = 0;
                double arg_v = -std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < ng; ++k) {
                    const auto& v = proj[(static_cast<std::size_t>(a) * no + o) * ng + k];
                    double x = 0.0;
                    for (const auto& [s, pr] : b.entries()) x += pr * v[s];
                    if (x > arg_v) {
                        arg_v = x;
                        arg = k;
                    }
                }
                const auto& v = proj[(static_cast<std::size_t>(a) * no + o) * ng + arg];
                for (StateId s = 0; s < ns; ++s) g[s] += gamma * v[s];
            }
            AlphaVector cand{std::move(g), a};
            const double value = cand.dot(b);
            if (value > best_value) {
                best_value = value;
                best[i] = std::move(cand);
            }
        }
        return 0.0;
    });

    std::vector<AlphaVector> vectors;
    for (auto& v : best) {
        const bool dup = std::any_of(vectors.begin(), vectors.end(),
                                     [&](const AlphaVector& w) { return w.tag == v.tag && w.values == v.values; });
        if (!dup) vectors.push_back(std::move(v));
    }
    AlphaVectorSet env(BoundKind::Lower, std::move(vectors));
    return with_request_vector(env, p.request_cost);
}

ValuePolicy pbvi_sr_solve(const PomdpSr& p, const BeliefSet& points, const PbviOptions& options) {
    AlphaVectorSet current = pbvi_initial_set(p, options.init);
    std::vector<double> values(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) values[i] = evaluate(current, points.points()[i]);
    double residual = std::numeric_limits<double>::infinity();
    for (long it = 1; it <= options.max_iters; ++it) {
        current = pbvi_sr_backup(p, points, current, options.exec);
        residual = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double v = evaluate(current, points.points()[i]);
            residual = std::max(residual, std::abs(v - values[i]));
            values[i] = v;
        }
        if (residual < options.tol) return ValuePolicy{std::move(current), it, residual};
    }
    throw NonConvergence("PBVI-SR did not converge", residual);
}

Decision execute_policy(const ValuePolicy& vp, const Belief& b) {
    Decision d;
    const auto& vectors = vp.gamma_set.vectors();
    const AlphaVector& win = vectors[argmax_vector(vp.gamma_set, b)];
    if (!win.is_request()) {
        d.action = win.tag;
        return d;
    }
    d.request = true;
    for (const auto& [s, pr] : b.entries()) {
        ActionId best = 0;
        double best_v = -std::numeric_limits<double>::infinity();
        for (const auto& v : vectors) {
            if (v.is_request()) continue;
            if (v.values[s] > best_v) {
                best_v = v.values[s];
                best = v.tag;
            }
        }
        d.action_by_state.emplace_back(s, best);
    }
    return d;
}

void expand_belief_set(const PomdpSr& p, BeliefSet& set, Rng& rng) {
    const PomdpModel& m = p.model;
    const std::vector<Belief> current = set.points();
    auto distance = [](const Belief& x, const Belief& y) {
        double d = 0.0;
        std::size_t i = 0;
        std::size_t j = 0;
        const auto ex = x.entries();
        const auto ey = y.entries();
        while (i < ex.size() || j < ey.size()) {
            if (j == ey.size() || (i < ex.size() && ex[i].first < ey[j].first)) {
                d += ex[i++].second;
            } else if (i == ex.size() || ey[j].first < ex[i].first) {
                d += ey[j++].second;
            } else {
                d += std::abs(ex[i++].second - ey[j++].second);
            }
        }
        return d;
    };
    for (const auto& b : current) {
        Belief farthest;
        double far_d = -1.0;
        for (ActionId a = 0; a < m.num_actions(); ++a) {
            const StateId s = sample_state(b, rng);
            const auto trans = m.transitions(s, a);
            const StateId s2 = trans[rng.categorical(trans, [](const SparseEntry& e) { return e.prob; })].index;
            const auto obs = m.observations(s2, a);
            const ObsId o = obs[rng.categorical(obs, [](const SparseEntry& e) { return e.prob; })].index;
            const Belief next = belief_update(m, b, a, o);
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& q : set.points()) nearest = std::min(nearest, distance(next, q));
            if (nearest > far_d) {
                far_d = nearest;
                farthest = next;
            }
        }
        if (far_d > 0.0) set.add(farthest);
    }
}

}  // namespace pomdpsr
