#pragma once

#include <cstdint>

namespace mflab {

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based stream: the value at `counter` depends only on (key, counter).
constexpr std::uint64_t counter_hash(std::uint64_t key, std::uint64_t counter) {
    return splitmix64(splitmix64(key) ^ splitmix64(counter ^ 0xD1B54A32D192ED03ULL));
}

/// Uniform double in the open interval (0, 1), 53 bits of resolution.
constexpr double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

}  // namespace mflab
