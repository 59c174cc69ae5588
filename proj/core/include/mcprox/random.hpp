#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <utility>

namespace mcprox {

using Rng = std::mt19937_64;

/// SplitMix64 step; derives independent stream seeds from (seed, stream).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Uniform integer in [0, n). The std distributions are implementation-defined,
/// so seeded outputs use these instead.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

/// Uniform double in [0, 1).
inline double uniform_unit(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }

/// Standard normal via Box-Muller (one value per call).
inline double standard_normal(Rng& rng) {
    double u1;
    do {
        u1 = uniform_unit(rng);
    } while (u1 <= 0.0);
    const double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = uniform_index(rng, i);
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

}  // namespace mcprox
