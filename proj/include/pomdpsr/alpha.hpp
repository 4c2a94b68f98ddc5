#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pomdpsr/model.hpp"

namespace pomdpsr {

/// Tag of the vector that stands for "pay the cost, observe, then act".
inline constexpr int kRequestTag = -1;

struct AlphaVector {
    std::vector<double> values;
    int tag = 0;  ///< environmental action id, or kRequestTag

    bool is_request() const noexcept { return tag == kRequestTag; }
    double dot(const Belief& b) const {
        double v = 0.0;
        for (const auto& [s, p] : b.entries()) v += p * values[s];
        return v;
    }
};

enum class BoundKind { Lower, Upper };

/// Piecewise-linear bound: max over vectors of <b, alpha>.
class AlphaVectorSet {
  public:
    AlphaVectorSet(BoundKind kind, std::vector<AlphaVector> vectors, std::optional<double> request_cost = std::nullopt);

    BoundKind kind() const noexcept { return kind_; }
    const std::vector<AlphaVector>& vectors() const noexcept { return vectors_; }
    std::size_t num_states() const noexcept { return vectors_.front().values.size(); }
    /// Cost used to derive the REQUEST vector, when the set has one.
    std::optional<double> request_cost() const noexcept { return request_cost_; }
    bool has_request_vector() const;
    const AlphaVector* find(int tag) const;

    /// Recomputes the REQUEST vector as -c + max over environmental vectors, if present.
    void rederive_request_vector();

  private:
    BoundKind kind_;
    std::vector<AlphaVector> vectors_;
    std::optional<double> request_cost_;
};

double evaluate(const AlphaVectorSet& set, const Belief& b);

/// Index of the maximizing vector; ties go to the earliest vector.
std::size_t argmax_vector(const AlphaVectorSet& set, const Belief& b);

/// Returns a copy of the set extended with alpha_c(s) = -c + max_a alpha_a(s).
AlphaVectorSet with_request_vector(const AlphaVectorSet& set, double request_cost);

}  // namespace pomdpsr
