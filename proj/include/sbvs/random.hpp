#pragma once

#include <cstdint>
#include <random>

namespace sbvs {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Child seed for stream `stream` of parent seed `seed`.
///
/// derive_seed(s, k) = splitmix64(splitmix64(s) ^ splitmix64(k + 1)).
/// Children of one parent are independent of the order in which they are
/// requested, so replications and imputations can be computed in any order
/// (or in parallel) and still reproduce bit-for-bit.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 1));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    return Rng{derive_seed(seed, stream)};
}

}  // namespace sbvs
