#pragma once

#include <cstdint>
#include <random>

namespace bootrobopt {

/// SplitMix64 mixing step (Steele, Lea & Flood 2014). Used for seed
/// derivation only, never as the sampling generator itself.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Pinned generator for all sampling: std::mt19937_64, whose output sequence
/// is fully specified by the C++ standard and therefore identical on every
/// conforming platform.
///
/// Stream contract: replicate `i` of a run seeded with `seed` draws from
/// mt19937_64 seeded with splitmix64(seed ^ splitmix64(i + 1)). Streams are
/// independent of evaluation order, so sequential and parallel replicate
/// generation produce byte-identical results.
inline std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t replicate_id) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(replicate_id + 1)));
}

/// Derive a named sub-stream seed (per asset, per experiment stage) from a
/// master seed. tag values must be distinct per call site.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (tag + 1));
}

/// Unbiased uniform integer in [0, n) via Lemire's multiply-reject method.
/// std::uniform_int_distribution is not pinned by the standard, so we roll
/// the bounded draw ourselves to keep emitted index paths reproducible.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    using u128 = unsigned __int128;
    u128 m = static_cast<u128>(rng()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (lo < threshold) {
            m = static_cast<u128>(rng()) * n;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double strictly inside (0, 1); safe as a quantile-transform input.
inline double uniform_open(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace bootrobopt
