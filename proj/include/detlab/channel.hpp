/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef DETLAB_CHANNEL_HPP
#define DETLAB_CHANNEL_HPP

#include <cmath>
#include <vector>

#include "detlab/cmatrix.hpp"
#include "detlab/errors.hpp"
#include "detlab/rng.hpp"

namespace detlab {

/// N x M matrix of i.i.d. CN(0,1) gains: M transmit, N receive antennas.
struct FlatChannel {
    CMatrix h; // n_rx x m_tx
    int m_tx = 0;
    int n_rx = 0;
};

inline FlatChannel draw_flat(int m_tx, int n_rx, Rng& rng) {
    if (m_tx < 1 || n_rx < 1)
        throw ConfigError("draw_flat: antenna counts must be >= 1");
    CMatrix h(static_cast<std::size_t>(n_rx), static_cast<std::size_t>(m_tx));
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < h.cols(); ++j)
            h(i, j) = rng.cgauss(1.0);
    return {std::move(h), m_tx, n_rx};
}

inline cvec add_awgn(std::span<const cplx> y, double noise_var, Rng& rng) {
    if (noise_var < 0.0)
        throw ConfigError("add_awgn: negative noise variance");
    cvec out(y.begin(), y.end());
    if (noise_var == 0.0)
        return out;
    for (cplx& v : out)
        v += rng.cgauss(noise_var);
    return out;
}

/// Exponential power delay profile truncated once the tail holds less
/// than 1e-3 of the total power, then normalized to unit total power.
struct DelayProfile {
    double tap_spacing = 40e-9; // sample period, 25 MHz
    double tau_rms = 0.0;
    int n_taps = 1;
    std::vector<double> tap_powers{1.0};

    static DelayProfile exponential(double tap_spacing, double tau_rms) {
        if (tap_spacing <= 0.0)
            throw ConfigError("DelayProfile: tap spacing must be positive");
        if (tau_rms < 0.0)
            throw ConfigError("DelayProfile: tau_rms must be >= 0");
        DelayProfile p;
        p.tap_spacing = tap_spacing;
        p.tau_rms = tau_rms;
        if (tau_rms == 0.0)
            return p; // single tap
        // Geometric tail of exp(-l*Ts/tau) beyond tap L is exp(-L*Ts/tau)
        // of the total, so L > (tau/Ts) * ln(1000) keeps it under 1e-3.
        const double ratio = tau_rms / tap_spacing;
        p.n_taps = static_cast<int>(std::ceil(ratio * std::log(1000.0))) + 1;
        p.tap_powers.assign(static_cast<std::size_t>(p.n_taps), 0.0);
        double total = 0.0;
        for (int l = 0; l < p.n_taps; ++l) {
            p.tap_powers[static_cast<std::size_t>(l)] = std::exp(-static_cast<double>(l) / ratio);
            total += p.tap_powers[static_cast<std::size_t>(l)];
        }
        for (double& w : p.tap_powers)
            w /= total;
        return p;
    }
};

/// Tapped-delay-line MIMO channel; tap l holds an N x M matrix whose
/// entries have variance tap_powers[l], unit total power per link.
struct TappedChannel {
    std::vector<CMatrix> taps;
    DelayProfile profile;
    int m_tx = 0;
    int n_rx = 0;
};

inline TappedChannel draw_tapped(int m_tx, int n_rx, const DelayProfile& profile, Rng& rng) {
    if (m_tx < 1 || n_rx < 1)
        throw ConfigError("draw_tapped: antenna counts must be >= 1");
    TappedChannel ch;
    ch.profile = profile;
    ch.m_tx = m_tx;
    ch.n_rx = n_rx;
    ch.taps.reserve(profile.tap_powers.size());
    for (double w : profile.tap_powers) {
        CMatrix t(static_cast<std::size_t>(n_rx), static_cast<std::size_t>(m_tx));
        for (std::size_t i = 0; i < t.rows(); ++i)
            for (std::size_t j = 0; j < t.cols(); ++j)
                t(i, j) = rng.cgauss(w);
        ch.taps.push_back(std::move(t));
    }
    return ch;
}

/// Noise variance for a target average per-receive-antenna Es/N0.
/// Convention: total transmit energy 1 per channel use (1/m_tx per
/// antenna), unit-power channel entries, so sigma^2 = 10^(-snr_db/10).
inline double snr_to_noise_var(double snr_db, int m_tx) {
    if (m_tx < 1)
        throw ConfigError("snr_to_noise_var: m_tx must be >= 1");
    if (std::isinf(snr_db) && snr_db > 0)
        return 0.0; // noise-free sentinel
    return std::pow(10.0, -snr_db / 10.0);
}

} // namespace detlab

#endif // DETLAB_CHANNEL_HPP
