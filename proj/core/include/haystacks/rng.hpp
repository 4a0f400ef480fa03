#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace haystacks {

// 64-bit FNV-1a. Used for seed derivation, model digests and cache keys;
// must stay stable across releases because cache files and checkpoint
// digests persist on disk.
inline constexpr std::uint64_t fnv1a64(std::string_view data,
                                       std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline constexpr std::uint64_t fnv1a64_mix(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 0x100000001b3ull;
    }
    return h;
}

// One global seed fans out to per-module / per-stage seeds through a
// labeled hash, so every pipeline step is independently reproducible.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
    return fnv1a64(label, fnv1a64_mix(0xcbf29ce484222325ull, base));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                                 std::uint64_t index) {
    return fnv1a64_mix(derive_seed(base, label), index);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

}  // namespace haystacks
