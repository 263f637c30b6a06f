#pragma once

#include <cstdint>

namespace jade {

/// SplitMix64 generator. Chosen over std distributions because its entire
/// output sequence is pinned by the algorithm, not the standard library
/// implementation, which keeps runs bit-reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    /// Derive an independent stream keyed by `key`; the parent stream is not
    /// consumed, so adding streams never perturbs existing ones.
    Rng stream(std::uint64_t key) const {
        Rng mixer(state_ ^ (0x6a09e667f3bcc909ull + key * 0x9e3779b97f4a7c15ull));
        return Rng(mixer.next_u64());
    }

private:
    std::uint64_t state_;
};

}  // namespace jade
