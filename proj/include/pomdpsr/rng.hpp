#pragma once

#include <cstdint>
#include <span>

namespace pomdpsr {

/**
 * Counter-based SplitMix64 stream.
 *
 * A stream is identified by (seed, stream id); the k-th draw is a pure function
 * of (seed, stream id, k), so episodes sample identically regardless of which
 * worker runs them.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire's nearly-divisionless method.
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = -n % n;
            while (low < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Index drawn from unnormalized nonnegative weights; falls back to the last positive weight on round-off.
    template <class Weights, class Get>
    std::size_t categorical(const Weights& weights, Get&& get) {
        double total = 0.0;
        for (const auto& w : weights) total += get(w);
        double u = uniform() * total;
        std::size_t last = 0;
        std::size_t i = 0;
        for (const auto& w : weights) {
            const double p = get(w);
            if (p > 0.0) {
                last = i;
                if (u < p) return i;
                u -= p;
            }
            ++i;
        }
        return last;
    }

    std::uint64_t counter() const noexcept { return counter_; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace pomdpsr
