#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mtirl {

using Rng = std::mt19937_64;

/// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

/// Seed for an independent stream identified by `keys` under `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = mix64(base);
    for (std::uint64_t k : keys) {
        h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    }
    return h;
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace mtirl
