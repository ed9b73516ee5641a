/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef DETLAB_RNG_HPP
#define DETLAB_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace detlab {

namespace detail {
// splitmix64 finalizer; used to turn (seed, index...) tuples into
// well-separated engine seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

/// Seeded random source. Gaussian variates are generated with the polar
/// Box-Muller transform rather than std::normal_distribution so that the
/// draw sequence is identical across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(detail::mix64(seed)) {}

    /// Independent stream for a work unit, e.g. (master, snr index, batch).
    static Rng derive(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) {
        std::uint64_t s = detail::mix64(master);
        s = detail::mix64(s ^ detail::mix64(a + 0x100000001ULL));
        s = detail::mix64(s ^ detail::mix64(b + 0x200000002ULL));
        s = detail::mix64(s ^ detail::mix64(c + 0x300000003ULL));
        return Rng(s);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return (gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free modulo is fine here: n is tiny (constellation
        // sizes, tap counts) relative to 2^64, bias is negligible.
        return gen_() % n;
    }

    int bit() { return static_cast<int>(gen_() >> 63); }

    /// Standard normal N(0, 1).
    double gauss() {
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

    /// Circularly symmetric complex Gaussian CN(0, var).
    std::complex<double> cgauss(double var = 1.0) {
        const double sd = std::sqrt(var / 2.0);
        const double re = sd * gauss();
        const double im = sd * gauss();
        return {re, im};
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace detlab

#endif // DETLAB_RNG_HPP
