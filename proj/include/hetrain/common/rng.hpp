#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace hetrain {

// Distribution helpers on top of mt19937_64. The standard <random>
// distributions are implementation-defined, so reproducible artifacts
// (model files, shuffles) go through these instead.

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Box-Muller without state; always consumes exactly two engine draws.
inline double gaussian(std::mt19937_64& rng, double mean = 0.0, double sigma = 1.0) {
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
}

/// splitmix64-style combiner for deriving stream seeds (shuffle per round,
/// noise per worker) from one base seed.
inline uint64_t seed_mix(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Fisher-Yates over [0, n); returns the permuted index vector.
template <typename SizeT = size_t>
std::vector<SizeT> shuffled_indices(SizeT n, std::mt19937_64& rng) {
    std::vector<SizeT> idx(n);
    for (SizeT i = 0; i < n; ++i) idx[i] = i;
    for (SizeT i = n; i > 1; --i) {
        SizeT j = static_cast<SizeT>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

} // namespace hetrain
