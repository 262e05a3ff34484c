#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "sdfl/errors.hpp"

namespace sdfl {

/// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// FNV-1a over the label bytes.
inline std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Deterministic, splittable random stream.
///
/// Every stream is identified by a 64-bit key. Child streams are derived from
/// the parent key (never from consumed engine state), so the derivation is
/// position independent: the same (key, label, index) always names the same
/// stream. Key recipe, fixed for reproducibility of all emitted CSVs:
///
///   key(parent, label, index) = mix64(mix64(parent ^ fnv1a(label)) ^ index)
///
/// Variates come from a std::mt19937_64 seeded with mix64(key); uniform
/// doubles use the top 53 bits, integer bounds use rejection sampling, and
/// exponentials use inversion. None of it depends on unspecified standard
/// library distribution internals.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : key_(key), engine_(mix64(key)) {}

    static std::uint64_t derive_key(std::uint64_t parent, std::string_view label,
                                    std::uint64_t index) {
        return mix64(mix64(parent ^ hash_label(label)) ^ index);
    }

    RngStream split(std::string_view label, std::uint64_t index = 0) const {
        return RngStream(derive_key(key_, label, index));
    }

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Exponential with the given mean (inversion; mean > 0).
    double exponential(double mean) { return -mean * std::log1p(-next_u01()); }

    /// Uniform integer in [lo, hi], inclusive, via unbiased rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw DomainError("uniform_int: empty range");
        std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        if (range == 0) return static_cast<std::int64_t>(next_u64()); // full 64-bit span
        std::uint64_t threshold = (0 - range) % range;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return lo + static_cast<std::int64_t>(r % range);
        }
    }

    /// Uniform real in [lo, hi).
    double uniform_real(double lo, double hi) { return lo + next_u01() * (hi - lo); }

private:
    std::uint64_t key_;
    std::mt19937_64 engine_;
};

} // namespace sdfl
