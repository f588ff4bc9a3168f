#pragma once

#include <cstdint>
#include <cstring>
#include <cmath>
#include <string_view>

namespace rag {

/// splitmix64 step: advances `state` and returns the next 64-bit output.
/// Used as the base generator everywhere so results do not depend on
/// standard-library distribution internals.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// FNV-1a over a byte range.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a64(s.data(), s.size(), h);
}

/// Derives an independent stream seed from a master seed, a component name
/// and an index. This is the single fan-out rule for every RNG stream in the
/// library: stream(master, name, i) is stable across runs and platforms.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view component,
                                 std::uint64_t index) {
    std::uint64_t s = fnv1a64(component) ^ (master + 0x9e3779b97f4a7c15ULL * (index + 1));
    splitmix64(s);
    return splitmix64(s);
}

/// Minimal counter-based generator. All randomness in the library flows
/// through this type; no <random> distributions are used, so identical seeds
/// give identical draws on every platform.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() { return splitmix64(state); }

    /// Uniform in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Modulo bias is below 2^-32 for any n that
    /// fits practical sample counts.
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

    /// Standard normal via Box-Muller. Draws two uniforms per call; no
    /// cached state, so interleaving with other draws stays reproducible.
    double normal() {
        double u1 = unit();
        double u2 = unit();
        // unit() can return exactly 0; log(0) would give -inf.
        while (u1 <= 0.0) u1 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }
};

/// Seed for a child node given its parent's node seed. Depends only on the
/// root-to-node path, never on traversal order or depth limits, so growing a
/// deeper tree extends the shallower one instead of reshuffling it.
inline std::uint64_t child_node_seed(std::uint64_t parent, bool right_branch) {
    std::uint64_t s = parent ^ (right_branch ? 0xa0761d6478bd642fULL : 0xe7037ed1a0b428dbULL);
    return splitmix64(s);
}

/// Order-preserving hash accumulator for fingerprinting numeric payloads.
struct Fnv1aStream {
    std::uint64_t h = 0xcbf29ce484222325ULL;

    void add_bytes(const void* data, std::size_t len) { h = fnv1a64(data, len, h); }

    void add(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        add_bytes(&bits, sizeof bits);
    }

    void add(std::uint64_t v) { add_bytes(&v, sizeof v); }

    std::uint64_t digest() const { return h; }
};

}  // namespace rag
