#pragma once

#include <cstdint>

namespace lifshitz {

// Counter-based generator: draw i is a pure function of (seed, i), so results
// do not depend on iteration or thread order.  The finalizer is splitmix64.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Sample seeds for ensemble member i.
inline std::uint64_t mix64(std::uint64_t master, std::uint64_t i) {
    return counter_hash(master, i);
}

// Uniform in the open interval (0,1); never exactly 0 or 1, so inverse-CDF
// samplers stay finite.
inline double u01(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform_at(std::uint64_t seed, std::uint64_t index) {
    return u01(counter_hash(seed, index));
}

} // namespace lifshitz
