#pragma once

#include <cstdint>
#include <random>

namespace tlrsom::rng {

// The standard <random> distributions are implementation-defined, so the
// mappings below pin the exact draw sequence; outputs stay byte-identical
// across compilers and platforms for a given mt19937_64 seed.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent seed for stream `stream` derived from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ (0x6a09e667f3bcc909ULL * (stream + 1));
    return splitmix64(s);
}

// Uniform double in [0, 1), 53 significant bits.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

// Uniform in [-1, 1).
inline double uniform_pm1(std::mt19937_64& eng) {
    return 2.0 * uniform01(eng) - 1.0;
}

inline std::uint64_t uniform_index(std::mt19937_64& eng, std::uint64_t n) {
    return n == 0 ? 0 : eng() % n;
}

inline bool bernoulli(std::mt19937_64& eng, double p) {
    return uniform01(eng) < p;
}

} // namespace tlrsom::rng
