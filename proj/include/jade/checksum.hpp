#pragma once

#include <cstdint>
#include <cstddef>
#include <string_view>

namespace jade {

/// Fixed-point encoding of a double (value * 2^32, rounded to nearest, half
/// away from zero). State checksums hash these instead of native doubles so
/// they never depend on platform float formatting.
inline std::int64_t fixed_encode(double v) {
    double scaled = v * 4294967296.0;
    return static_cast<std::int64_t>(scaled < 0 ? scaled - 0.5 : scaled + 0.5);
}

/// Incremental 64-bit FNV-1a. Used for state checkpoints and config digests;
/// fed only with explicitly encoded integers so results are identical on any
/// platform.
class Fnv1a64 {
public:
    static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ull;
    static constexpr std::uint64_t kPrime = 0x00000100000001b3ull;

    void add_byte(std::uint8_t b) {
        hash_ ^= b;
        hash_ *= kPrime;
    }

    void add_bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        for (std::size_t i = 0; i < n; ++i) add_byte(p[i]);
    }

    void add_u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) add_byte(std::uint8_t(v >> (8 * i)));
    }

    void add_i64(std::int64_t v) { add_u64(static_cast<std::uint64_t>(v)); }

    void add_fixed(double v) { add_i64(fixed_encode(v)); }

    void add_string(std::string_view s) {
        add_u64(s.size());
        add_bytes(s.data(), s.size());
    }

    std::uint64_t value() const { return hash_; }

private:
    std::uint64_t hash_ = kOffset;
};

}  // namespace jade
