#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fracflow {

/// Counter-based generator: the k-th draw of stream (seed, key) is a pure function of
/// (seed, key, k). split() derives an independent child stream, so runs that fan out
/// stay reproducible regardless of scheduling.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t key = 0) : seed_(seed), key_(key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t at(std::uint64_t counter) const {
        return mix(mix(seed_ ^ mix(key_)) + counter);
    }
    std::uint64_t next() { return at(counter_++); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal by Box–Muller (one value per two draws; no cached state).
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    CounterRng split(std::uint64_t child) const { return CounterRng(seed_, mix(key_ + 1) ^ child); }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace fracflow
