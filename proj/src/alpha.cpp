#include "pomdpsr/alpha.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pomdpsr {

namespace {

std::vector<double> request_values(const std::vector<AlphaVector>& vectors, std::size_t ns, double cost) {
    std::vector<double> best(ns, -std::numeric_limits<double>::infinity());
    for (const auto& v : vectors) {
        if (v.is_request()) continue;
        for (std::size_t s = 0; s < ns; ++s) best[s] = std::max(best[s], v.values[s]);
    }
    for (double& x : best) x -= cost;
    return best;
}

}  // namespace

AlphaVectorSet::AlphaVectorSet(BoundKind kind, std::vector<AlphaVector> vectors, std::optional<double> request_cost)
    : kind_(kind), vectors_(std::move(vectors)), request_cost_(request_cost) {
    if (vectors_.empty()) throw ModelError("alpha-vector set must not be empty");
    const std::size_t n = vectors_.front().values.size();
    if (n == 0) throw ModelError("alpha vectors must not be empty");
    bool has_env = false;
    for (const auto& v : vectors_) {
        if (v.values.size() != n) throw ModelError("alpha vectors have different lengths");
        for (double x : v.values) {
            if (!std::isfinite(x)) throw ModelError("alpha vector entry is not finite");
        }
        if (v.is_request()) {
            if (!request_cost_) throw ModelError("REQUEST vector needs a request cost");
        } else {
            if (v.tag < 0) throw ModelError("invalid alpha vector tag " + std::to_string(v.tag));
            has_env = true;
        }
    }
    if (!has_env) throw ModelError("alpha-vector set has no environmental vector");
}

bool AlphaVectorSet::has_request_vector() const { return find(kRequestTag) != nullptr; }

const AlphaVector* AlphaVectorSet::find(int tag) const {
    for (const auto& v : vectors_) {
        if (v.tag == tag) return &v;
    }
    return nullptr;
}

void AlphaVectorSet::rederive_request_vector() {
    if (!request_cost_) return;
    for (auto& v : vectors_) {
        if (v.is_request()) v.values = request_values(vectors_, num_states(), *request_cost_);
    }
}

double evaluate(const AlphaVectorSet& set, const Belief& b) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : set.vectors()) best = std::max(best, v.dot(b));
    return best;
}

std::size_t argmax_vector(const AlphaVectorSet& set, const Belief& b) {
    std::size_t arg = 0;
    double best = -std::numeric_limits<double>::infinity();
    const auto& vs = set.vectors();
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const double v = vs[i].dot(b);
        if (v > best) {
            best = v;
            arg = i;
        }
    }
    return arg;
}

AlphaVectorSet with_request_vector(const AlphaVectorSet& set, double request_cost) {
    std::vector<AlphaVector> vectors;
    for (const auto& v : set.vectors()) {
        if (!v.is_request()) vectors.push_back(v);
    }
    AlphaVector req{request_values(vectors, set.num_states(), request_cost), kRequestTag};
    vectors.push_back(std::move(req));
    return AlphaVectorSet(set.kind(), std::move(vectors), request_cost);
}

}  // namespace pomdpsr
