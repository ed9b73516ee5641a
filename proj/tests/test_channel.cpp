/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "detlab/channel.hpp"

using namespace detlab;

TEST_CASE("draw_flat is deterministic for a given seed") {
    Rng a(7), b(7);
    const FlatChannel ca = draw_flat(2, 2, a);
    const FlatChannel cb = draw_flat(2, 2, b);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(ca.h(i, j) == cb.h(i, j));
}

TEST_CASE("draw_flat entries have unit variance and zero mean") {
    Rng rng(42);
    double sum2 = 0.0;
    cplx mean = 0.0;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
        const FlatChannel ch = draw_flat(4, 4, rng);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                sum2 += std::norm(ch.h(i, j));
                mean += ch.h(i, j);
            }
    }
    const double n = draws * 16.0;
    CHECK(sum2 / n == Catch::Approx(1.0).margin(0.05));
    CHECK(std::abs(mean) / n < 0.01);
}

TEST_CASE("1x2 branch power sums to the receive antenna count") {
    Rng rng(43);
    double sum = 0.0;
    const int draws = 20000;
    for (int t = 0; t < draws; ++t) {
        const FlatChannel ch = draw_flat(1, 2, rng);
        sum += std::norm(ch.h(0, 0)) + std::norm(ch.h(1, 0));
    }
    CHECK(sum / draws == Catch::Approx(2.0).margin(0.1));
}

TEST_CASE("|h| follows the Rayleigh(1/sqrt(2)) distribution") {
    Rng rng(44);
    const int n = 100000;
    std::vector<double> mags(n);
    for (int t = 0; t < n; ++t)
        mags[static_cast<std::size_t>(t)] = std::abs(rng.cgauss(1.0));
    std::sort(mags.begin(), mags.end());
    // One-sample Kolmogorov-Smirnov distance against the Rayleigh CDF.
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = mags[static_cast<std::size_t>(i)];
        const double cdf = 1.0 - std::exp(-x * x); // sigma^2 = 1/2
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        ks = std::max({ks, std::abs(cdf - lo), std::abs(cdf - hi)});
    }
    CHECK(ks < 0.01);
}

TEST_CASE("add_awgn: zero variance is the identity, draws reproducible") {
    const cvec y = {cplx(1.0, -1.0), cplx(0.5, 2.0)};
    Rng rng(3);
    CHECK(add_awgn(y, 0.0, rng) == y);

    Rng r1(9), r2(9);
    CHECK(add_awgn(y, 0.3, r1) == add_awgn(y, 0.3, r2));
}

TEST_CASE("add_awgn empirical variance matches") {
    Rng rng(45);
    const cvec zero(8, cplx(0.0, 0.0));
    const double var = 0.7;
    double sum2 = 0.0;
    const int draws = 20000;
    for (int t = 0; t < draws; ++t) {
        const cvec w = add_awgn(zero, var, rng);
        for (const cplx& v : w)
            sum2 += std::norm(v);
    }
    CHECK(sum2 / (draws * 8.0) == Catch::Approx(var).epsilon(0.05));
}

TEST_CASE("snr_to_noise_var fixed values") {
    CHECK(snr_to_noise_var(0.0, 1) == Catch::Approx(1.0));
    CHECK(snr_to_noise_var(0.0, 4) == Catch::Approx(1.0));
    CHECK(snr_to_noise_var(10.0, 2) == Catch::Approx(0.1));
    CHECK(snr_to_noise_var(3.0103, 3) == Catch::Approx(0.5).margin(1e-6));
    CHECK(snr_to_noise_var(std::numeric_limits<double>::infinity(), 2) == 0.0);
}

TEST_CASE("exponential delay profile: tap ratio and truncation") {
    const DelayProfile p = DelayProfile::exponential(40e-9, 50e-9);
    CHECK(p.n_taps == static_cast<int>(p.tap_powers.size()));
    CHECK(p.tap_powers[1] / p.tap_powers[0] ==
          Catch::Approx(std::exp(-40.0 / 50.0)).epsilon(1e-12));
    double total = 0.0;
    for (double w : p.tap_powers)
        total += w;
    CHECK(total == Catch::Approx(1.0).margin(1e-12));
    // Tail beyond the kept taps is below 1e-3 of the total.
    const double q = std::exp(-40.0 / 50.0);
    CHECK(std::pow(q, p.n_taps) < 1e-3);
}

TEST_CASE("delay profile reproduces tau_rms within 10% for tau >= 2 Ts") {
    const double ts = 40e-9;
    for (double tau : {80e-9, 120e-9, 200e-9}) {
        const DelayProfile p = DelayProfile::exponential(ts, tau);
        double mean = 0.0, m2 = 0.0;
        for (int l = 0; l < p.n_taps; ++l) {
            const double d = l * ts;
            mean += p.tap_powers[static_cast<std::size_t>(l)] * d;
            m2 += p.tap_powers[static_cast<std::size_t>(l)] * d * d;
        }
        const double rms = std::sqrt(m2 - mean * mean);
        CHECK(rms == Catch::Approx(tau).epsilon(0.10));
    }
}

TEST_CASE("draw_tapped: degenerate profile equals a flat draw") {
    const DelayProfile p = DelayProfile::exponential(40e-9, 0.0);
    REQUIRE(p.n_taps == 1);
    Rng r1(11), r2(11);
    const TappedChannel tc = draw_tapped(2, 2, p, r1);
    const FlatChannel fc = draw_flat(2, 2, r2);
    REQUIRE(tc.taps.size() == 1);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(tc.taps[0](i, j) == fc.h(i, j));
}

TEST_CASE("draw_tapped total link power is 1 on average") {
    const DelayProfile p = DelayProfile::exponential(40e-9, 50e-9);
    Rng rng(46);
    double sum = 0.0;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
        const TappedChannel ch = draw_tapped(2, 2, p, rng);
        for (const CMatrix& tap : ch.taps)
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j)
                    sum += std::norm(tap(i, j));
    }
    CHECK(sum / (draws * 4.0) == Catch::Approx(1.0).margin(0.05));
}
