#pragma once

#include <cstdint>

namespace nimbus {

// Deterministic seed plumbing. Everything stochastic in the library derives
// from these three functions so that outputs are reproducible bit-for-bit
// across runs, platforms, and thread counts. The mixer is the splitmix64
// finalizer (Steele/Lea/Flood).

inline constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer: a 64-bit avalanche over x.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += kSeedStride;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Item seed i of a stream rooted at `base`: mix64 of base advanced i+1 strides.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(base + index * kSeedStride);
}

/// Tagged sub-stream of a seed (thickness draw, offset draw, ...).
constexpr std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ tag);
}

/// Map a 64-bit word to a double in [0, 1).
constexpr double to_unit_double(std::uint64_t u) {
    return static_cast<double>(u >> 11) * 0x1.0p-53;
}

/// Uniform integer in [lo, hi] from one 64-bit word (modulo reduction; the
/// bias for the tiny ranges used here is below 2^-60).
constexpr int to_uniform_int(std::uint64_t u, int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(u % span);
}

} // namespace nimbus
