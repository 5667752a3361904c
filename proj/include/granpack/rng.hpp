#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace granpack {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

// Deterministic generator with explicitly coded variate transforms, so a
// fixed seed reproduces the same stream on every platform we build for.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(detail::splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0,1).
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
    }

    // Uniform on (a,b).
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard normal deviate, Marsaglia polar method with one cached value.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * f;
        has_cached_ = true;
        return u * f;
    }

    // Exponential with the given rate.
    double exponential(double rate) { return -std::log(uniform01()) / rate; }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Derives an independent per-stage stream from one root seed, so a single
// seed controls every stage of the pipeline without manual bookkeeping.
inline Rng substream(std::uint64_t root_seed, std::string_view stage) {
    return Rng(detail::splitmix64(root_seed ^ detail::fnv1a64(stage)));
}

} // namespace granpack
