#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace aesn {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for stream `index` (ensemble member, tuner trial, model component)
/// derived from a base seed. The scheme is fixed: both values are whitened
/// with splitmix64 and combined by xor, so streams never collide for
/// distinct indices under the same base.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index + 1));
}

/**
 * Deterministic random source used for every weight draw in the library.
 *
 * All real-valued draws are built from the top 53 bits of a mt19937_64
 * stream rather than std::uniform_real_distribution, so a given seed
 * reproduces the same values on any platform and standard library.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Uniform on the open symmetric interval (-a, a). The single point
    /// u = 0 that would land on -a exactly is redrawn.
    double uniform_open_sym(double a) {
        double u = uniform();
        while (u == 0.0) {
            u = uniform();
        }
        return a * (2.0 * u - 1.0);
    }

    /// ln(x) uniform on [ln lo, ln hi); degenerate brackets return lo exactly.
    double log_uniform(double lo, double hi) {
        if (!(lo > 0.0) || hi < lo) {
            throw std::invalid_argument("log_uniform: bracket must satisfy 0 < lo <= hi");
        }
        if (lo == hi) {
            return lo;
        }
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    /// Uniform integer on {lo, ..., hi} inclusive.
    long uniform_int(long lo, long hi) {
        if (hi < lo) {
            throw std::invalid_argument("uniform_int: hi < lo");
        }
        const double span = static_cast<double>(hi - lo) + 1.0;
        long v = lo + static_cast<long>(uniform() * span);
        return v > hi ? hi : v;
    }

    bool bernoulli(double p) {
        return uniform() < p;
    }

    /// Standard normal via Box-Muller on the deterministic uniform stream.
    double normal() {
        double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace aesn
