// Seed derivation and portable sampling primitives.  All randomized paths
// use mt19937_64 streams with splitmix64-derived per-batch seeds and an
// explicit Box-Muller transform, so results are reproducible bit-for-bit
// across platforms for a fixed (seed, batch plan).
#ifndef PQNC_RNG_HPP
#define PQNC_RNG_HPP

#include <cstdint>
#include <cmath>
#include <random>

#include "pqnc/types.hpp"

namespace pqnc {

inline constexpr const char* rng_algorithm_name = "mt19937_64+splitmix64/box-muller";

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d9b4ea3df58c85ULL;
    return z ^ (z >> 31);
}

// Independent stream seed for batch `index` of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x2545f4914f6cdd1dULL * (index + 1));
    return splitmix64(s);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1]; safe as a log argument.
inline double uniform01_open(std::mt19937_64& g) {
    return (static_cast<double>(g() >> 11) + 1.0) * 0x1.0p-53;
}

// One standard-normal pair via Box-Muller.
inline void gaussian_pair(std::mt19937_64& g, double& n0, double& n1) {
    const double r = std::sqrt(-2.0 * std::log(uniform01_open(g)));
    const double t = two_pi * uniform01(g);
    n0 = r * std::cos(t);
    n1 = r * std::sin(t);
}

inline int uniform_int(std::mt19937_64& g, int n) {
    // Rejection-free modulo is fine here: n is tiny (<= 64) compared to 2^64.
    return static_cast<int>(g() % static_cast<std::uint64_t>(n));
}

} // namespace pqnc

#endif
