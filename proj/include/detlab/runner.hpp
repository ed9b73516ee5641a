/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef DETLAB_RUNNER_HPP
#define DETLAB_RUNNER_HPP

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "detlab/config.hpp"
#include "detlab/version.hpp"

namespace detlab {

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Temp file + rename, so a crashed run never leaves a partial result.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out)
            throw IoError("write failed for '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
}

inline std::string sweep_meta(const RunConfig& cfg, double wall_s) {
    const SweepSpec& s = cfg.sweep;
    std::ostringstream m;
    m << "detlab_version = " << version << '\n';
    m << "command = " << to_string(cfg.command) << '\n';
    m << "detector = " << detector_name(s.detector) << '\n';
    m << "m_tx = " << s.m_tx << '\n';
    m << "n_rx = " << s.n_rx << '\n';
    m << "constellation = " << to_string(s.constellation) << '\n';
    m << "snr_db =";
    for (double v : s.snr_points_db)
        m << ' ' << fmt_g(v);
    m << '\n';
    m << "target_errors = " << s.target_errors << '\n';
    m << "max_trials = " << s.max_trials << '\n';
    m << "mode = " << to_string(s.mode) << '\n';
    m << "channel = " << to_string(s.channel) << '\n';
    m << "seed = " << s.seed << '\n';
    m << "workers = " << s.workers << '\n';
    if (s.channel == ChannelModel::OfdmTapped) {
        m << "n_fft = " << s.ofdm.n_fft << '\n';
        m << "cp_len = " << s.ofdm.cp_len << '\n';
        m << "sample_period_ns = " << fmt_g(s.ofdm.sample_period * 1e9) << '\n';
        m << "tau_rms_ns = " << fmt_g(s.tau_rms_ns) << '\n';
        m << "n_train = " << s.n_train << '\n';
    }
    if (s.mode == SweepMode::QuasiStaticPer)
        m << "payload_bits = " << s.payload_bits << '\n';
    m << "snr_convention = average received Es/N0 per receive antenna; total transmit "
         "energy 1 per channel use split across m_tx antennas; unit-power channel entries\n";
    m << "ebn0_note = Eb/N0 = Es/N0 - 10*log10(bits_per_symbol) dB under this convention\n";
    m << "ofdm_note = all subcarriers carry data; no pilots or guards\n";
    m << "wall_time_s = " << fmt_g(wall_s) << '\n';
    return m.str();
}

inline std::string learn_meta(const RunConfig& cfg, double wall_s) {
    const LearnSpec& l = cfg.learn;
    std::ostringstream m;
    m << "detlab_version = " << version << '\n';
    m << "command = learn\n";
    m << "algo = " << (l.algo == AdaptAlgo::Lms ? "lms" : "rls") << '\n';
    m << "m_tx = " << l.m_tx << '\n';
    m << "n_rx = " << l.n_rx << '\n';
    m << "constellation = " << to_string(l.params.constellation) << '\n';
    m << "snr_db = " << fmt_g(l.snr_db) << '\n';
    m << "mu = " << fmt_g(l.params.mu) << '\n';
    m << "lambda = " << fmt_g(l.params.lambda) << '\n';
    m << "pi0 = " << fmt_g(l.params.pi0) << '\n';
    m << "probe_symbols = " << l.params.probe_symbols << '\n';
    m << "n_train = " << l.n_train << '\n';
    m << "n_ensemble = " << l.n_ensemble << '\n';
    m << "seed = " << l.seed << '\n';
    m << "workers = " << l.workers << '\n';
    m << "snr_convention = average received Es/N0 per receive antenna; total transmit "
         "energy 1 per channel use split across m_tx antennas; unit-power channel entries\n";
    m << "probe_note = instantaneous BER on a fixed held-out probe block re-detected with "
         "the weights frozen after each training symbol\n";
    m << "wall_time_s = " << fmt_g(wall_s) << '\n';
    return m.str();
}

} // namespace detail

/// Execute a validated config: run the experiment, write the result CSV
/// atomically plus a `<out>.meta` reproduction record. Returns the
/// process exit status.
inline int run(const RunConfig& cfg, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    try {
        const auto t0 = std::chrono::steady_clock::now();
        auto wall = [&t0] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        };
        switch (cfg.command) {
        case Command::Ber:
        case Command::Per: {
            const SweepResult r = cfg.command == Command::Ber ? run_ber_sweep(cfg.sweep)
                                                              : run_per_sweep(cfg.sweep);
            detail::write_file_atomic(cfg.output_path, to_csv(r));
            detail::write_file_atomic(cfg.output_path + ".meta", detail::sweep_meta(cfg, wall()));
            out << "wrote " << cfg.output_path << " (" << r.points.size() << " snr points)\n";
            break;
        }
        case Command::Learn: {
            const LearnSpec& l = cfg.learn;
            const std::vector<double> curve =
                learning_curve(l.m_tx, l.n_rx, l.snr_db, l.algo, l.params, l.n_train,
                               l.n_ensemble, l.seed, l.workers);
            std::string csv = "iteration,ber\n";
            for (std::size_t i = 0; i < curve.size(); ++i) {
                csv += std::to_string(i + 1);
                csv += ',';
                csv += detail::fmt_g(curve[i]);
                csv += '\n';
            }
            detail::write_file_atomic(cfg.output_path, csv);
            detail::write_file_atomic(cfg.output_path + ".meta", detail::learn_meta(cfg, wall()));
            out << "wrote " << cfg.output_path << " (" << curve.size() << " iterations)\n";
            break;
        }
        case Command::Gap: {
            SweepResult a, b;
            a.points = parse_sweep_csv(detail::read_file(cfg.gap.curve_a));
            b.points = parse_sweep_csv(detail::read_file(cfg.gap.curve_b));
            const double gap = snr_gap_at_ber(a, b, cfg.gap.ber_target);
            out << "gap_db = " << detail::fmt_g(gap) << " at ber = "
                << detail::fmt_g(cfg.gap.ber_target) << '\n';
            break;
        }
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace detlab

#endif // DETLAB_RUNNER_HPP
