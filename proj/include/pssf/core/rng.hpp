#pragma once

// Deterministic random number generation. Every stochastic stage of the
// pipeline draws from a RandomStream seeded through derive_seed(), so results
// are independent of thread scheduling and identical across runs.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <string_view>

namespace pssf {

// SplitMix64 step; also used as a finalizer to decorrelate seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
    return splitmix64(x);
}

// FNV-1a over raw bytes. Used for stable substream naming, not security.
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

// Stable 64-bit seed for a named substream. The tag parts are joined with a
// separator byte so ("ab","c") and ("a","bc") hash differently.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::string_view> parts) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    unsigned char mbytes[8];
    for (int i = 0; i < 8; ++i) mbytes[i] = static_cast<unsigned char>(master >> (8 * i));
    h = fnv1a64(mbytes, 8, h);
    for (const auto& part : parts) {
        const unsigned char sep = 0x1f;
        h = fnv1a64(&sep, 1, h);
        h = fnv1a64(part.data(), part.size(), h);
    }
    return mix64(h);
}

// xoshiro256++ (Blackman & Vigna). Fast, 256-bit state, well tested.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// One named stream of random draws. All distributions consume a fixed number
// of generator outputs per call for a given argument, keeping replay exact.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    RandomStream(std::uint64_t master, std::initializer_list<std::string_view> parts)
        : gen_(derive_seed(master, parts)) {}

    std::uint64_t next_u64() { return gen_.next(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Uniform integer in [0, n) by rejection (unbiased).
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = gen_.next();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    // Poisson sample: Knuth multiplication below lambda = 10, Hormann's PTRS
    // transformed-rejection above. Both consume a data-dependent number of
    // uniforms, which is fine because each image owns its stream.
    std::int64_t poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        if (lambda < 10.0) return poisson_knuth(lambda);
        return poisson_ptrs(lambda);
    }

private:
    std::int64_t poisson_knuth(double lambda) {
        const double limit = std::exp(-lambda);
        double prod = 1.0;
        std::int64_t k = -1;
        do {
            prod *= uniform();
            ++k;
        } while (prod > limit);
        return k;
    }

    std::int64_t poisson_ptrs(double lambda) {
        const double slam = std::sqrt(lambda);
        const double loglam = std::log(lambda);
        const double b = 0.931 + 2.53 * slam;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double vr = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            const double u = uniform() - 0.5;
            const double v = uniform();
            const double us = 0.5 - std::abs(u);
            const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
            if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
            if (k < 0.0 || (us < 0.013 && v > us)) continue;
            const double logv = std::log(v * inv_alpha / (a / (us * us) + b));
            if (logv <= k * loglam - lambda - std::lgamma(k + 1.0)) {
                return static_cast<std::int64_t>(k);
            }
        }
    }

    Xoshiro256pp gen_;
};

}  // namespace pssf
