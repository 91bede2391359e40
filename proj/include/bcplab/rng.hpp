#pragma once

#include <cstdint>

namespace bcplab {

/// Finalizer of SplitMix64; a well-mixed 64-bit permutation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Keyed mixing function used for MinHash: H(seed, rep, component, element).
inline std::uint64_t hash_keyed(std::uint64_t seed, std::uint64_t rep,
                                std::uint64_t component, std::uint64_t x) {
    return mix64(mix64(mix64(mix64(seed) ^ rep) ^ component) ^ x);
}

/// Derive an independent stream seed from a base seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream));
}

/// Deterministic counter-based generator (SplitMix64). Unlike the standard
/// distributions, its output is identical on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return mix64(state_++); }

    /// Uniform draw in [0, bound) via 128-bit multiply-shift.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool next_bool() { return (next() & 1u) != 0; }

private:
    std::uint64_t state_;
};

}  // namespace bcplab
