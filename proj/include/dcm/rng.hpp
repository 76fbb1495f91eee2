#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace dcm {

/// FNV-1a 64-bit hash. Used for provenance digests and seed derivation;
/// not cryptographic.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// SplitMix64 finalizer; scrambles correlated inputs into well-mixed seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed, a purpose tag and
/// an index. Streams for distinct (tag, index) pairs do not collide in
/// practice, and derivation is stable across platforms and versions.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index = 0) {
    return mix64(mix64(master ^ fnv1a64(tag)) + index);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::string_view key,
                                 std::uint64_t index = 0) {
    return mix64(mix64(master ^ fnv1a64(tag)) + mix64(fnv1a64(key)) + index);
}

/// Deterministic RNG with self-contained variate transforms. The engine is
/// std::mt19937_64 (sequence fixed by the standard); the distributions are
/// implemented here because the std::* distributions are not guaranteed to
/// produce identical streams across library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Bernoulli draw: true with probability p. p=1 is always true and
    /// p=0 always false, since uniform() < 1.
    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via polar Box-Muller (one value per call; the spare
    /// is cached so consumption stays deterministic).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape < 1 handled by
    /// boosting to shape+1 and scaling by U^(1/shape).
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
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
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
                return d * v;
        }
    }

    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace dcm
