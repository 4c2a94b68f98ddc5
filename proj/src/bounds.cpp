#include "pomdpsr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pomdpsr {

namespace {

std::vector<double> initial_values(const PomdpModel& m, BoundKind kind, BoundInit init) {
    double start = 0.0;
    if (init == BoundInit::RewardBound) {
        const double r = kind == BoundKind::Upper ? m.max_reward() : m.min_reward();
        start = r / (1.0 - m.discount());
    }
    return std::vector<double>(static_cast<std::size_t>(m.num_states()) * m.num_actions(), start);
}

AlphaVectorSet to_set(const PomdpModel& m, BoundKind kind, const std::vector<double>& values) {
    const int ns = m.num_states();
    std::vector<AlphaVector> vectors;
    vectors.reserve(m.num_actions());
    for (ActionId a = 0; a < m.num_actions(); ++a) {
        const auto begin = values.begin() + static_cast<std::ptrdiff_t>(a) * ns;
        vectors.push_back({std::vector<double>(begin, begin + ns), a});
    }
    return AlphaVectorSet(kind, std::move(vectors));
}

template <class Sweep>
std::vector<double> fixed_point(std::vector<double> values, const SolverOptions& opts, const char* name,
                                Sweep&& sweep) {
    std::vector<double> next(values.size());
    double change = std::numeric_limits<double>::infinity();
    for (long it = 0; it < opts.max_iters; ++it) {
        change = sweep(values, next);
        values.swap(next);
        if (change < opts.tol) return values;
    }
    throw NonConvergence(std::string(name) + " did not converge", change);
}

}  // namespace

AlphaVectorSet blind_lower_bound(const PomdpModel& m, const SolverOptions& opts) {
    auto values = fixed_point(initial_values(m, BoundKind::Lower, opts.init), opts, "blind bound",
                              [&](const std::vector<double>& in, std::vector<double>& out) {
                                  return kernels::blind_sweep(m, in, out, opts.exec);
                              });
    return to_set(m, BoundKind::Lower, values);
}

AlphaVectorSet qmdp(const PomdpModel& m, const SolverOptions& opts) {
    auto values = fixed_point(initial_values(m, BoundKind::Upper, opts.init), opts, "QMDP",
                              [&](const std::vector<double>& in, std::vector<double>& out) {
                                  return kernels::qmdp_sweep(m, in, out, opts.exec);
                              });
    return to_set(m, BoundKind::Upper, values);
}

AlphaVectorSet fib(const PomdpModel& m, const SolverOptions& opts) {
    const JointTable joint(m);
    auto values = fixed_point(initial_values(m, BoundKind::Upper, opts.init), opts, "FIB",
                              [&](const std::vector<double>& in, std::vector<double>& out) {
                                  return kernels::fib_sweep(m, joint, in, in, out, opts.exec);
                              });
    return to_set(m, BoundKind::Upper, values);
}

AlphaVectorSet fib_sr(const PomdpSr& p, const SolverOptions& opts) {
    const PomdpModel& m = p.model;
    const JointTable joint(m);
    const std::size_t ns = m.num_states();
    const std::size_t env_size = ns * m.num_actions();

    // Layout: environmental vectors action-major, then the REQUEST vector.
    std::vector<double> gamma_set = initial_values(m, BoundKind::Upper, opts.init);
    gamma_set.resize(env_size + ns);
    auto derive_request = [&](std::vector<double>& set) {
        for (std::size_t s = 0; s < ns; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < static_cast<std::size_t>(m.num_actions()); ++a)
                best = std::max(best, set[a * ns + s]);
            set[env_size + s] = best - p.request_cost;
        }
    };
    derive_request(gamma_set);

    auto values = fixed_point(std::move(gamma_set), opts, "FIB-SR",
                              [&](const std::vector<double>& in, std::vector<double>& out) {
                                  const std::span<const double> env_in(in.data(), env_size);
                                  const std::span<double> env_out(out.data(), env_size);
                                  double change = kernels::fib_sweep(m, joint, in, env_in, env_out, opts.exec);
                                  derive_request(out);
                                  for (std::size_t s = 0; s < ns; ++s)
                                      change = std::max(change, std::abs(out[env_size + s] - in[env_size + s]));
                                  return change;
                              });

    std::vector<AlphaVector> vectors;
    for (ActionId a = 0; a < m.num_actions(); ++a) {
        const auto begin = values.begin() + static_cast<std::ptrdiff_t>(a * ns);
        vectors.push_back({std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(ns)), a});
    }
    vectors.push_back({std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(env_size), values.end()),
                       kRequestTag});
    return AlphaVectorSet(BoundKind::Upper, std::move(vectors), p.request_cost);
}

AlphaVectorSet improve_from_graph(const AlphaVectorSet& set, const CornerValues& corner_values) {
    if (corner_values.source != set.kind())
        throw KindMismatch(set.kind() == BoundKind::Upper ? "upper set improved with lower values"
                                                          : "lower set improved with upper values");
    const bool upper = set.kind() == BoundKind::Upper;
    std::vector<AlphaVector> vectors = set.vectors();
    const std::size_t ns = set.num_states();
    for (const auto& [key, value] : corner_values.values) {
        const auto [s, a] = key;
        if (s < 0 || static_cast<std::size_t>(s) >= ns) throw ModelError("corner value state out of range");
        for (auto& v : vectors) {
            if (v.tag != a) continue;
            v.values[s] = upper ? std::min(v.values[s], value) : std::max(v.values[s], value);
        }
    }
    const auto cost = set.request_cost();
    if (cost) {
        for (auto& v : vectors) {
            if (!v.is_request()) continue;
            for (std::size_t s = 0; s < ns; ++s) {
                double best = -std::numeric_limits<double>::infinity();
                for (const auto& env : vectors) {
                    if (!env.is_request()) best = std::max(best, env.values[s]);
                }
                const double derived = best - *cost;
                v.values[s] = upper ? std::min(v.values[s], derived) : std::max(v.values[s], derived);
            }
        }
    }
    return AlphaVectorSet(set.kind(), std::move(vectors), cost);
}

}  // namespace pomdpsr
