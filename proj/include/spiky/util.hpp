#pragma once

#include <cstdint>
#include <string>

namespace spiky {

/// Deterministic splitmix64 generator. Used everywhere instead of the
/// standard distributions so that seeded runs are bit-identical across
/// platforms.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in {0, ..., n-1}.
    int next_below(int n) { return int(next_u64() % std::uint64_t(n)); }

    bool next_bool() { return (next_u64() >> 63) != 0; }
};

/// FNV-1a over a byte string, used for content hashes in certificates.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace spiky
