#include "pomdpsr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pomdpsr {

double parallel_max(int n, Exec exec, const std::function<double(int)>& body) {
    double result = 0.0;
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) reduction(max : result)
        for (int i = 0; i < n; ++i) result = std::max(result, body(i));
    } else {
        for (int i = 0; i < n; ++i) result = std::max(result, body(i));
    }
    return result;
}

JointTable::JointTable(const PomdpModel& m) : num_actions_(m.num_actions()) {
    const int ns = m.num_states();
    const int na = m.num_actions();
    const int no = m.num_observations();
    std::vector<std::vector<SparseEntry>> by_obs(no);
    std::vector<ObsId> used;
    group_offsets_.reserve(static_cast<std::size_t>(ns) * na + 1);
    group_offsets_.push_back(0);
    for (StateId s = 0; s < ns; ++s) {
        for (ActionId a = 0; a < na; ++a) {
            used.clear();
            for (const auto& t : m.transitions(s, a)) {
                for (const auto& o : m.observations(t.index, a)) {
                    if (by_obs[o.index].empty()) used.push_back(o.index);
                    by_obs[o.index].push_back({t.index, t.prob * o.prob});
                }
            }
            std::sort(used.begin(), used.end());
            for (ObsId o : used) {
                const std::size_t begin = entries_.size();
                entries_.insert(entries_.end(), by_obs[o].begin(), by_obs[o].end());
                groups_.push_back({o, begin, entries_.size()});
                by_obs[o].clear();
            }
            group_offsets_.push_back(groups_.size());
        }
    }
}

namespace kernels {

namespace {

double row_change(std::span<const double> in, std::span<const double> out, std::size_t idx) {
    return std::abs(out[idx] - in[idx]);
}

}  // namespace

double blind_sweep(const PomdpModel& m, std::span<const double> in, std::span<double> out, Exec exec) {
    const int ns = m.num_states();
    const int na = m.num_actions();
    const double gamma = m.discount();
    return parallel_max(ns, exec, [&](int s) {
        double change = 0.0;
        for (ActionId a = 0; a < na; ++a) {
            const std::size_t base = static_cast<std::size_t>(a) * ns;
            double v = 0.0;
            for (const auto& t : m.transitions(s, a)) v += t.prob * in[base + t.index];
            out[base + s] = m.reward(s, a) + gamma * v;
            change = std::max(change, row_change(in, out, base + s));
        }
        return change;
    });
}

double qmdp_sweep(const PomdpModel& m, std::span<const double> in, std::span<double> out, Exec exec) {
    const int ns = m.num_states();
    const int na = m.num_actions();
    const double gamma = m.discount();
    std::vector<double> best(ns, -std::numeric_limits<double>::infinity());
    for (ActionId a = 0; a < na; ++a) {
        for (StateId s = 0; s < ns; ++s) best[s] = std::max(best[s], in[static_cast<std::size_t>(a) * ns + s]);
    }
    return parallel_max(ns, exec, [&](int s) {
        double change = 0.0;
        for (ActionId a = 0; a < na; ++a) {
            const std::size_t idx = static_cast<std::size_t>(a) * ns + s;
            double v = 0.0;
            for (const auto& t : m.transitions(s, a)) v += t.prob * best[t.index];
            out[idx] = m.reward(s, a) + gamma * v;
            change = std::max(change, row_change(in, out, idx));
        }
        return change;
    });
}

double fib_sweep(const PomdpModel& m, const JointTable& joint, std::span<const double> gamma_set,
                 std::span<const double> in, std::span<double> out, Exec exec) {
    const int ns = m.num_states();
    const int na = m.num_actions();
    const double gamma = m.discount();
    const std::size_t ng = gamma_set.size() / static_cast<std::size_t>(ns);
    return parallel_max(ns, exec, [&](int s) {
        double change = 0.0;
        for (ActionId a = 0; a < na; ++a) {
            const std::size_t idx = static_cast<std::size_t>(a) * ns + s;
            double future = 0.0;
            for (const auto& g : joint.groups(s, a)) {
                double best = -std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < ng; ++k) {
                    const double* vec = gamma_set.data() + k * ns;
                    double v = 0.0;
                    for (std::size_t e = g.begin; e < g.end; ++e) {
                        const auto& entry = joint.entry(e);
                        v += entry.prob * vec[entry.index];
                    }
                    best = std::max(best, v);
                }
                future += best;
            }
            out[idx] = m.reward(s, a) + gamma * future;
            change = std::max(change, row_change(in, out, idx));
        }
        return change;
    });
}

}  // namespace kernels

}  // namespace pomdpsr
