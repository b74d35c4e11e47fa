#pragma once

#include <cmath>
#include <cstdint>

#include "avgcase/errors.hpp"

namespace avgcase {

/// Deterministic random stream with a fixed bit-level algorithm
/// (splitmix64 seeding + xoshiro256++), so that identical seeds produce
/// identical doubles on every platform and thread count.  The standard
/// library distributions are deliberately avoided: their output is
/// unspecified and differs between implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& si : s_) si = splitmix64(x);
        have_cached_ = false;
        cached_ = 0.0;
    }

    /// Independent substream `index` of a master seed.  Mixes both values
    /// through splitmix64 so that (seed, 1) and (seed + 1, 0) differ.
    static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
        std::uint64_t x = master_seed;
        std::uint64_t h = splitmix64(x);
        x = h ^ (0x9e3779b97f4a7c15ULL * (index + 1));
        return Rng(splitmix64(x));
    }

    /// Next raw 64-bit word (xoshiro256++).
    std::uint64_t next_u64() {
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

    /// Uniform draw in (0, 1]: 53 random bits, never exactly zero, so it is
    /// safe inside logarithms.
    double uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; one spare value is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape < 1 uses the
    /// standard boost Gamma(shape+1) * U^{1/shape}.
    double gamma(double shape) {
        if (!(shape > 0.0))
            throw ArgumentError("gamma draw requires shape > 0");
        if (shape < 1.0) {
            double g = gamma(shape + 1.0);
            return g * std::pow(uniform(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform();
            double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static std::uint64_t splitmix64(std::uint64_t& state) {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t s_[4];
    bool have_cached_;
    double cached_;
};

} // namespace avgcase
