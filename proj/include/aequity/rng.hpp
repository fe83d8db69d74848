#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace aequity {

/// splitmix64 finalizer. Full-avalanche: every input bit flips every output
/// bit with probability ~1/2.
inline std::uint64_t avalanche64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derive a child seed from (parent, tag). Used everywhere a deterministic
/// per-task stream is needed (bootstrap index, grid size, epoch index) so
/// results never depend on execution order.
inline std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t tag) {
    return avalanche64(parent + 0x9E3779B97F4A7C15ULL * (tag + 1));
}

/// Deterministic PRNG (splitmix64 stream). Not std::* distributions: those
/// are implementation-defined, and curve cells must reproduce bit-identically.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return avalanche64(state_);
    }

    /// Uniform in (0, 1), never exactly 0 or 1.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        // rejection sampling on the top multiple of n
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    /// Standard normal via Box-Muller (second value cached).
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace aequity
