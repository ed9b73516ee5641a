/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef DETLAB_SIMKIT_HPP
#define DETLAB_SIMKIT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "detlab/channel.hpp"
#include "detlab/cmatrix.hpp"
#include "detlab/detect.hpp"
#include "detlab/errors.hpp"
#include "detlab/modem.hpp"
#include "detlab/ofdm.hpp"
#include "detlab/rng.hpp"

namespace detlab {

enum class SweepMode { FastFadingBer, QuasiStaticPer };
enum class ChannelModel { Flat, OfdmTapped };

inline std::string to_string(SweepMode m) {
    return m == SweepMode::FastFadingBer ? "fast_fading_ber" : "quasi_static_per";
}
inline std::string to_string(ChannelModel c) {
    return c == ChannelModel::Flat ? "flat" : "ofdm_tapped";
}

/// Everything one sweep needs. SNR is average received Es/N0 per receive
/// antenna in dB, with total transmit energy 1 per channel use.
struct SweepSpec {
    DetectorKind detector = DetectorKind::Zf;
    int m_tx = 2;
    int n_rx = 2;
    ModName constellation = ModName::BPSK;
    std::vector<double> snr_points_db;
    std::uint64_t max_trials = 100'000'000;
    std::uint64_t target_errors = 100;
    SweepMode mode = SweepMode::FastFadingBer;
    ChannelModel channel = ChannelModel::Flat;
    std::uint64_t seed = 1;
    int workers = 0; // 0 = hardware concurrency

    // ofdm_tapped channel and packet framing
    OfdmParams ofdm;
    double tau_rms_ns = 0.0;
    int payload_bits = 2048; // total across streams, per packet
    int n_train = 0;         // training OFDM symbols per packet
};

struct SnrPointResult {
    double snr_db = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t packet_errors = 0;
    double ber = 0.0;
    double per = 0.0;
    double ber_ci95 = 0.0;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SnrPointResult> points;
};

// ---------------------------------------------------------------------------
// Closed-form reference curves
// ---------------------------------------------------------------------------

namespace detail {

inline double rayleigh_pair_ber(double ebn0_db, double split) {
    if (std::isinf(ebn0_db) && ebn0_db > 0)
        return 0.0;
    const double g = std::pow(10.0, ebn0_db / 10.0);
    const double p = 0.5 - 0.5 / std::sqrt(1.0 + split / g);
    return p * p * (1.0 + 2.0 * (1.0 - p));
}

} // namespace detail

/// BPSK BER of 1x2 maximal ratio combining in Rayleigh fading.
inline double analytic_ber_mrc(double ebn0_db) {
    return detail::rayleigh_pair_ber(ebn0_db, 1.0);
}

/// BPSK BER of the 2x1 Alamouti block code in Rayleigh fading (total
/// transmit power split across the two antennas).
inline double analytic_ber_stbc(double ebn0_db) {
    return detail::rayleigh_pair_ber(ebn0_db, 2.0);
}

// ---------------------------------------------------------------------------
// Monte Carlo engine
// ---------------------------------------------------------------------------

namespace detail {

struct BatchStats {
    std::uint64_t trials = 0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t packet_errors = 0;

    void operator+=(const BatchStats& o) {
        trials += o.trials;
        bits += o.bits;
        bit_errors += o.bit_errors;
        packet_errors += o.packet_errors;
    }
};

inline std::uint64_t popcount_diff(std::uint32_t a, std::uint32_t b) {
    std::uint32_t d = a ^ b;
    std::uint64_t n = 0;
    while (d) {
        n += d & 1u;
        d >>= 1;
    }
    return n;
}

/// One flat fast-fading vector trial (or Alamouti block).
inline void flat_ber_trial(const SweepSpec& spec, const Constellation& c, double noise_var,
                           const Detector& det, Rng& rng, BatchStats& st) {
    const std::size_t m = static_cast<std::size_t>(spec.m_tx);
    const double tx_scale = 1.0 / std::sqrt(static_cast<double>(spec.m_tx));
    const FlatChannel ch = draw_flat(spec.m_tx, spec.n_rx, rng);
    const CMatrix h_eff = ch.h.scaled(tx_scale);

    if (spec.detector == DetectorKind::Stbc) {
        const std::uint32_t l1 = static_cast<std::uint32_t>(rng.below(c.size()));
        const std::uint32_t l2 = static_cast<std::uint32_t>(rng.below(c.size()));
        const StbcBlock blk = stbc_encode(c.points[l1], c.points[l2]);
        const std::size_t n = static_cast<std::size_t>(spec.n_rx);
        cvec y1(n), y2(n);
        for (std::size_t i = 0; i < n; ++i) {
            y1[i] = h_eff(i, 0) * blk.s(0, 0) + h_eff(i, 1) * blk.s(1, 0) + rng.cgauss(noise_var);
            y2[i] = h_eff(i, 0) * blk.s(0, 1) + h_eff(i, 1) * blk.s(1, 1) + rng.cgauss(noise_var);
        }
        const auto [s1, s2] = stbc_decode(y1, y2, h_eff, c);
        st.bit_errors += popcount_diff(static_cast<std::uint32_t>(slice_index(s1, c)), l1);
        st.bit_errors += popcount_diff(static_cast<std::uint32_t>(slice_index(s2, c)), l2);
        st.bits += 2 * static_cast<std::uint64_t>(c.k);
        st.trials += 1;
        return;
    }

    std::vector<std::uint32_t> labels(m);
    cvec x(m);
    for (std::size_t s = 0; s < m; ++s) {
        labels[s] = static_cast<std::uint32_t>(rng.below(c.size()));
        x[s] = c.points[labels[s]];
    }
    cvec y = matvec(h_eff, x);
    for (cplx& v : y)
        v += rng.cgauss(noise_var);
    const cvec xhat = det.detect(y, h_eff, c);
    for (std::size_t s = 0; s < m; ++s)
        st.bit_errors +=
            popcount_diff(static_cast<std::uint32_t>(slice_index(xhat[s], c)), labels[s]);
    st.bits += m * static_cast<std::uint64_t>(c.k);
    st.trials += 1;
}

/// One quasi-static flat-fading packet.
inline void flat_per_trial(const SweepSpec& spec, const Constellation& c, double noise_var,
                           const Detector& det, Rng& rng, BatchStats& st) {
    const std::size_t m = static_cast<std::size_t>(spec.m_tx);
    const double tx_scale = 1.0 / std::sqrt(static_cast<double>(spec.m_tx));
    const FlatChannel ch = draw_flat(spec.m_tx, spec.n_rx, rng);
    const CMatrix h_eff = ch.h.scaled(tx_scale);

    const std::size_t n_vec =
        static_cast<std::size_t>(spec.payload_bits) / (m * static_cast<std::size_t>(c.k));
    std::uint64_t errs = 0;
    std::vector<std::uint32_t> labels(m);
    cvec x(m);
    for (std::size_t v = 0; v < n_vec; ++v) {
        for (std::size_t s = 0; s < m; ++s) {
            labels[s] = static_cast<std::uint32_t>(rng.below(c.size()));
            x[s] = c.points[labels[s]];
        }
        cvec y = matvec(h_eff, x);
        for (cplx& w : y)
            w += rng.cgauss(noise_var);
        const cvec xhat = det.detect(y, h_eff, c);
        for (std::size_t s = 0; s < m; ++s)
            errs += popcount_diff(static_cast<std::uint32_t>(slice_index(xhat[s], c)), labels[s]);
    }
    st.bit_errors += errs;
    st.bits += n_vec * m * static_cast<std::uint64_t>(c.k);
    st.packet_errors += errs > 0 ? 1 : 0;
    st.trials += 1;
}

/// One packet through the full OFDM time-domain pipeline. In fast-fading
/// BER mode the packet is a single OFDM symbol and the channel is redrawn
/// per call; in quasi-static PER mode it is the whole payload.
inline void ofdm_trial(const SweepSpec& spec, const Constellation& c, double noise_var,
                       const Detector& det, const DelayProfile& profile, int payload_bits,
                       Rng& rng, BatchStats& st) {
    const double tx_scale = 1.0 / std::sqrt(static_cast<double>(spec.m_tx));
    const TappedChannel ch = draw_tapped(spec.m_tx, spec.n_rx, profile, rng);

    Packet pkt;
    pkt.streams = spec.m_tx;
    pkt.n_train = spec.n_train;
    pkt.payload_bits.resize(static_cast<std::size_t>(payload_bits));
    for (std::uint8_t& b : pkt.payload_bits)
        b = static_cast<std::uint8_t>(rng.bit());

    std::vector<cvec> tx = ofdm_transmit(pkt, c, spec.ofdm, spec.m_tx);
    for (cvec& stream : tx)
        for (cplx& v : stream)
            v *= tx_scale;
    std::vector<cvec> rx = apply_tapped_channel(tx, ch);
    if (noise_var > 0.0)
        for (cvec& stream : rx)
            for (cplx& v : stream)
                v += rng.cgauss(noise_var);

    std::vector<CMatrix> sub = channel_to_subcarriers(ch, spec.ofdm);
    for (CMatrix& hk : sub)
        hk = hk.scaled(tx_scale);

    const bitvec got = ofdm_receive(rx, sub, det, spec.ofdm, c, spec.n_train);
    std::uint64_t errs = 0;
    for (std::size_t i = 0; i < got.size(); ++i)
        errs += got[i] != pkt.payload_bits[i] ? 1 : 0;
    st.bit_errors += errs;
    st.bits += got.size();
    st.packet_errors += errs > 0 ? 1 : 0;
    st.trials += 1;
}

inline BatchStats run_batch(const SweepSpec& spec, std::size_t point_idx, std::uint64_t batch_idx,
                            std::uint64_t first_trial, std::uint64_t n_trials) {
    const Constellation& c = Constellation::by_name(spec.constellation);
    const double snr_db = spec.snr_points_db[point_idx];
    const double noise_var = snr_to_noise_var(snr_db, spec.m_tx);
    const double snr_lin =
        noise_var > 0.0 ? 1.0 / noise_var : std::numeric_limits<double>::infinity();
    const Detector det{spec.detector, snr_lin};
    const std::uint64_t mode_tag = spec.mode == SweepMode::FastFadingBer ? 1 : 2;
    Rng rng = Rng::derive(spec.seed, (mode_tag << 32) | point_idx, batch_idx);
    (void)first_trial;

    BatchStats st;
    if (spec.channel == ChannelModel::Flat) {
        if (spec.mode == SweepMode::FastFadingBer) {
            for (std::uint64_t t = 0; t < n_trials; ++t)
                flat_ber_trial(spec, c, noise_var, det, rng, st);
        } else {
            for (std::uint64_t t = 0; t < n_trials; ++t)
                flat_per_trial(spec, c, noise_var, det, rng, st);
        }
    } else {
        const DelayProfile profile =
            DelayProfile::exponential(spec.ofdm.sample_period, spec.tau_rms_ns * 1e-9);
        const int payload = spec.mode == SweepMode::FastFadingBer
                                ? c.k * spec.m_tx * spec.ofdm.n_fft
                                : spec.payload_bits;
        for (std::uint64_t t = 0; t < n_trials; ++t)
            ofdm_trial(spec, c, noise_var, det, profile, payload, rng, st);
    }
    return st;
}

inline std::uint64_t batch_size_for(const SweepSpec& spec) {
    if (spec.channel == ChannelModel::OfdmTapped)
        return spec.mode == SweepMode::FastFadingBer ? 64 : 16;
    return spec.mode == SweepMode::FastFadingBer ? 2048 : 32;
}

inline void validate_spec(const SweepSpec& spec) {
    if (spec.m_tx < 1 || spec.n_rx < 1)
        throw ConfigError("antenna counts must be >= 1");
    if (spec.snr_points_db.empty())
        throw ConfigError("snr_db list must not be empty");
    if (spec.target_errors < 1)
        throw ConfigError("target_errors must be >= 1");
    if (spec.max_trials < 1)
        throw ConfigError("max_trials must be >= 1");
    const Constellation& c = Constellation::by_name(spec.constellation);

    switch (spec.detector) {
    case DetectorKind::Mrc:
        if (spec.m_tx != 1)
            throw ConfigError("detector 'mrc' requires m_tx = 1");
        break;
    case DetectorKind::Stbc:
        if (spec.m_tx != 2)
            throw ConfigError("detector 'stbc' requires m_tx = 2");
        if (spec.channel == ChannelModel::OfdmTapped)
            throw ConfigError("detector 'stbc' is not supported on the ofdm_tapped channel");
        break;
    case DetectorKind::Ml: {
        std::uint64_t cand = 1;
        for (int s = 0; s < spec.m_tx; ++s) {
            cand *= c.size();
            if (cand > ml_candidate_limit)
                throw ConfigError("detector 'ml' search space exceeds 2^16 candidates");
        }
        break;
    }
    default:
        if (spec.m_tx > spec.n_rx)
            throw ConfigError("detector '" + detector_name(spec.detector) +
                              "' requires m_tx <= n_rx");
        break;
    }

    if (spec.channel == ChannelModel::OfdmTapped) {
        spec.ofdm.validate();
        if (spec.tau_rms_ns < 0.0)
            throw ConfigError("tau_rms_ns must be >= 0");
        const DelayProfile profile =
            DelayProfile::exponential(spec.ofdm.sample_period, spec.tau_rms_ns * 1e-9);
        if (profile.n_taps > spec.ofdm.cp_len + 1)
            throw CpTooShort("delay profile has more taps than cp_len + 1");
    }
    if (spec.mode == SweepMode::QuasiStaticPer) {
        const int block = spec.channel == ChannelModel::OfdmTapped
                              ? c.k * spec.m_tx * spec.ofdm.n_fft
                              : c.k * spec.m_tx;
        if (spec.payload_bits <= 0 || spec.payload_bits % block != 0)
            throw ConfigError("payload_bits must be a positive multiple of " +
                              std::to_string(block));
    }
}

inline SweepResult run_sweep(const SweepSpec& spec) {
    validate_spec(spec);
    int workers = spec.workers;
    if (workers <= 0)
        workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1)
        workers = 1;
    const std::uint64_t batch_size = batch_size_for(spec);

    SweepResult result;
    result.spec = spec;
    result.points.resize(spec.snr_points_db.size());

    for (std::size_t pi = 0; pi < spec.snr_points_db.size(); ++pi) {
        std::vector<BatchStats> batches;
        BatchStats acc;
        std::size_t included = 0;
        std::uint64_t next_batch = 0;
        bool stop = false;
        while (!stop) {
            const std::size_t k = static_cast<std::size_t>(workers);
            batches.resize(next_batch + k);
            {
                std::vector<std::thread> pool;
                pool.reserve(k);
                for (std::size_t w = 0; w < k; ++w) {
                    const std::uint64_t b = next_batch + w;
                    const std::uint64_t first = b * batch_size;
                    const std::uint64_t n =
                        first >= spec.max_trials
                            ? 0
                            : std::min(batch_size, spec.max_trials - first);
                    pool.emplace_back([&spec, pi, b, first, n, &batches] {
                        batches[b] = n == 0 ? BatchStats{}
                                            : run_batch(spec, pi, b, first, n);
                    });
                }
                for (auto& t : pool)
                    t.join();
            }
            next_batch += k;

            // Deterministic early stop: accumulate the batch prefix in
            // index order, so the included set never depends on workers.
            while (included < next_batch && !stop) {
                acc += batches[included];
                ++included;
                const std::uint64_t errs = spec.mode == SweepMode::QuasiStaticPer
                                               ? acc.packet_errors
                                               : acc.bit_errors;
                if (errs >= spec.target_errors || acc.trials >= spec.max_trials)
                    stop = true;
            }
        }

        SnrPointResult& pt = result.points[pi];
        pt.snr_db = spec.snr_points_db[pi];
        pt.trials = acc.trials;
        pt.bits = acc.bits;
        pt.bit_errors = acc.bit_errors;
        pt.packet_errors = acc.packet_errors;
        pt.ber = acc.bits > 0 ? static_cast<double>(acc.bit_errors) / static_cast<double>(acc.bits)
                              : 0.0;
        pt.per = acc.trials > 0 && spec.mode == SweepMode::QuasiStaticPer
                     ? static_cast<double>(acc.packet_errors) / static_cast<double>(acc.trials)
                     : 0.0;
        pt.ber_ci95 = acc.bits > 0
                          ? 1.96 * std::sqrt(pt.ber * (1.0 - pt.ber) /
                                             static_cast<double>(acc.bits))
                          : 0.0;
    }
    return result;
}

} // namespace detail

/// Fast-fading BER sweep: channel redrawn every vector symbol (every
/// OFDM symbol on the ofdm_tapped channel). Stops a point once
/// target_errors bit errors or max_trials trials are reached.
inline SweepResult run_ber_sweep(const SweepSpec& spec) {
    if (spec.mode != SweepMode::FastFadingBer)
        throw ConfigError("run_ber_sweep: mode must be fast_fading_ber");
    return detail::run_sweep(spec);
}

/// Quasi-static PER sweep: channel drawn once per packet, a packet is in
/// error when any payload bit is. Stops on target_errors packet errors.
inline SweepResult run_per_sweep(const SweepSpec& spec) {
    if (spec.mode != SweepMode::QuasiStaticPer)
        throw ConfigError("run_per_sweep: mode must be quasi_static_per");
    return detail::run_sweep(spec);
}

// ---------------------------------------------------------------------------
// Curve utilities and CSV
// ---------------------------------------------------------------------------

namespace detail {

/// SNR where a monotone-decreasing BER curve crosses the target, by
/// linear interpolation in (snr_db, log10 ber).
inline double snr_at_ber(const std::vector<SnrPointResult>& pts, double target) {
    if (!(target > 0.0))
        throw TargetNotBracketed("ber target must be positive");
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i].ber, b = pts[i + 1].ber;
        if (a == target)
            return pts[i].snr_db;
        if (a > target && target >= b && b > 0.0) {
            const double la = std::log10(a), lb = std::log10(b), lt = std::log10(target);
            return pts[i].snr_db +
                   (pts[i + 1].snr_db - pts[i].snr_db) * (la - lt) / (la - lb);
        }
    }
    if (!pts.empty() && pts.back().ber == target)
        return pts.back().snr_db;
    throw TargetNotBracketed("ber target not bracketed by curve points");
}

} // namespace detail

/// SNR gap (a minus b, in dB) between two BER curves at a target BER.
inline double snr_gap_at_ber(const SweepResult& a, const SweepResult& b, double ber_target) {
    return detail::snr_at_ber(a.points, ber_target) - detail::snr_at_ber(b.points, ber_target);
}

inline const char* sweep_csv_header = "snr_db,trials,bits,bit_errors,packet_errors,ber,per,ber_ci95";

namespace detail {
inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}
} // namespace detail

/// One header row plus one row per SNR point, decimal-dot, newline
/// terminated. Identical spec + seed gives byte-identical text.
inline std::string to_csv(const SweepResult& r) {
    std::string out = sweep_csv_header;
    out += '\n';
    for (const SnrPointResult& p : r.points) {
        out += detail::fmt_g(p.snr_db);
        out += ',';
        out += std::to_string(p.trials);
        out += ',';
        out += std::to_string(p.bits);
        out += ',';
        out += std::to_string(p.bit_errors);
        out += ',';
        out += std::to_string(p.packet_errors);
        out += ',';
        out += detail::fmt_g(p.ber);
        out += ',';
        out += detail::fmt_g(p.per);
        out += ',';
        out += detail::fmt_g(p.ber_ci95);
        out += '\n';
    }
    return out;
}

/// Parse text produced by to_csv (used by the gap command).
inline std::vector<SnrPointResult> parse_sweep_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != sweep_csv_header)
        throw ParseError("sweep csv: missing or unexpected header row");
    std::vector<SnrPointResult> pts;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        SnrPointResult p;
        char* end = nullptr;
        const char* s = line.c_str();
        auto next_field = [&](bool last) {
            s = end;
            if (last) {
                if (*s != '\0')
                    throw ParseError("sweep csv: trailing characters on line " +
                                     std::to_string(lineno));
            } else {
                if (*s != ',')
                    throw ParseError("sweep csv: expected ',' on line " + std::to_string(lineno));
                ++s;
            }
        };
        p.snr_db = std::strtod(s, &end);
        next_field(false);
        p.trials = std::strtoull(s, &end, 10);
        next_field(false);
        p.bits = std::strtoull(s, &end, 10);
        next_field(false);
        p.bit_errors = std::strtoull(s, &end, 10);
        next_field(false);
        p.packet_errors = std::strtoull(s, &end, 10);
        next_field(false);
        p.ber = std::strtod(s, &end);
        next_field(false);
        p.per = std::strtod(s, &end);
        next_field(false);
        p.ber_ci95 = std::strtod(s, &end);
        next_field(true);
        pts.push_back(p);
    }
    return pts;
}

} // namespace detlab

#endif // DETLAB_SIMKIT_HPP
