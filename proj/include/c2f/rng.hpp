#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace c2f {

namespace detail {

// SplitMix64 finalizer, used to whiten seeds and derive sub-streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// FNV-1a over a label, so sub-stream derivation reads as seed ^ hash(label).
inline std::uint64_t label_hash(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace detail

// Derive an independent sub-seed from a master seed and a label.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
    return detail::splitmix64(master ^ detail::label_hash(label));
}

// Derive an indexed sub-seed (per episode, per worker, per cell, ...).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index) {
    return detail::splitmix64(derive_seed(master, label) ^ detail::splitmix64(index));
}

// Deterministic random stream. The transforms are spelled out here instead of
// relying on std distributions so the draw sequence is identical on every
// platform and easy to reason about in tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(detail::splitmix64(seed)) {}

    // Independent stream derived from this stream's seed; unaffected by how
    // many draws were consumed so far.
    Rng substream(std::string_view label) const { return Rng(derive_seed(seed_, label)); }
    Rng substream(std::string_view label, std::uint64_t index) const {
        return Rng(derive_seed(seed_, label, index));
    }

    std::uint64_t seed() const { return seed_; }

    // Uniform in [0, 1) with 53-bit resolution.
    double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Uniform integer in [lo, hi] inclusive. Modulo bias is negligible for
    // the small ranges used here.
    long uniform_int(long lo, long hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<long>(engine_() % span);
    }

    // Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double normal() {
        double u1 = u01();
        while (u1 <= 0.0) u1 = u01();
        const double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace c2f
