#pragma once

#include <cstdint>
#include <random>

namespace fitchoice {

using Engine = std::mt19937_64;

/// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of replica `index` in an ensemble. Injective in `index` for a fixed
/// master seed, so replicas of one ensemble never share a stream seed.
constexpr std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
    return mix64(mix64(master_seed) + index);
}

/// Uniform double in [0, 1) from exactly one engine output.
inline double uniform01(Engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) from exactly one engine output.
inline std::uint64_t uniform_index(Engine& rng, std::uint64_t n) {
    auto k = static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(n));
    return k < n ? k : n - 1;
}

}  // namespace fitchoice
