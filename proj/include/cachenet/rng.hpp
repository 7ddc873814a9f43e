#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cachenet {

// Deterministic draws built directly on the mt19937_64 bit stream. The
// <random> distribution classes are implementation-defined, so every draw
// here is hand-rolled: a (config, seed) pair reproduces bit-for-bit on any
// toolchain that ships a conforming mt19937_64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1]
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unit-mean exponential
    double exponential() { return -std::log(uniform_pos()); }

    // standard normal, Box-Muller with cached spare
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    // Poisson count by summing unit exponentials until they exceed the mean.
    // O(mean), exact for the means used here (at most a few thousand).
    long poisson(double mean) {
        if (mean <= 0.0) return 0;
        long n = -1;
        double acc = 0.0;
        while (acc <= mean) {
            acc += exponential();
            ++n;
        }
        return n;
    }

    // unbiased index in [0, n)
    std::size_t index(std::size_t n) {
        if (n <= 1) return 0;
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// SplitMix64 step; used to derive independent substreams from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ (stream + 0x632be59bd9b4e019ULL));
}

}  // namespace cachenet
