/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef DETLAB_ADAPT_HPP
#define DETLAB_ADAPT_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "detlab/channel.hpp"
#include "detlab/cmatrix.hpp"
#include "detlab/detect.hpp"
#include "detlab/errors.hpp"
#include "detlab/modem.hpp"
#include "detlab/rng.hpp"

namespace detlab {

enum class AdaptAlgo { Lms, Rls };

inline AdaptAlgo adapt_algo_from_name(const std::string& s) {
    if (s == "lms")
        return AdaptAlgo::Lms;
    if (s == "rls")
        return AdaptAlgo::Rls;
    throw ValidationError("unknown adaptive algorithm '" + s + "' (lms|rls)");
}

/// Running weight matrix plus, for RLS, the inverse correlation matrix P.
/// Steps are functional: each update returns the successor state.
struct AdaptiveState {
    CMatrix w;        // M x N combining weights
    CMatrix p;        // N x N, RLS only
    double mu = 0.02; // LMS step size
    double lambda = 0.99;
    double pi0 = 100.0;
    std::uint64_t iteration = 0;

    static AdaptiveState lms(std::size_t m_tx, std::size_t n_rx, double mu) {
        AdaptiveState s;
        s.w = CMatrix(m_tx, n_rx);
        s.mu = mu;
        return s;
    }

    static AdaptiveState rls(std::size_t m_tx, std::size_t n_rx, double lambda, double pi0) {
        if (!(lambda > 0.0) || lambda > 1.0)
            throw ConfigError("AdaptiveState: lambda must be in (0, 1]");
        if (!(pi0 > 0.0))
            throw ConfigError("AdaptiveState: pi0 must be positive");
        AdaptiveState s;
        s.w = CMatrix(m_tx, n_rx);
        s.p = CMatrix::identity(n_rx).scaled(pi0);
        s.lambda = lambda;
        s.pi0 = pi0;
        return s;
    }
};

/// Second-order statistics of the receive vector, R_y = sx2 H H^H + sz2 I.
struct SignalStats {
    double sigma_x2 = 1.0;
    double sigma_z2 = 0.0;
    CMatrix r_y;

    static SignalStats from_channel(const CMatrix& h, double sigma_x2, double sigma_z2) {
        SignalStats st;
        st.sigma_x2 = sigma_x2;
        st.sigma_z2 = sigma_z2;
        st.r_y = matmul(h, hermitian(h)).scaled(sigma_x2);
        for (std::size_t i = 0; i < st.r_y.rows(); ++i)
            st.r_y(i, i) += sigma_z2;
        return st;
    }
};

/// One stochastic-gradient update: w += mu * (x - w y) y^H.
inline AdaptiveState lms_step(const AdaptiveState& state, std::span<const cplx> x,
                              std::span<const cplx> y) {
    AdaptiveState next = state;
    const std::size_t m = state.w.rows();
    const std::size_t n = state.w.cols();
    if (x.size() != m || y.size() != n)
        throw Error("lms_step: dimension mismatch");
    const cvec est = matvec(state.w, y);
    for (std::size_t i = 0; i < m; ++i) {
        const cplx e = x[i] - est[i];
        for (std::size_t j = 0; j < n; ++j)
            next.w(i, j) += state.mu * e * std::conj(y[j]);
    }
    ++next.iteration;
    return next;
}

/// Mean-square convergence bound for the LMS step size: 2 / lambda_max(R_y).
inline double lms_max_step(const SignalStats& stats) {
    const double lmax = max_eigenvalue_hermitian(stats.r_y);
    if (lmax <= 0.0)
        throw ConfigError("lms_max_step: R_y is not positive definite");
    return 2.0 / lmax;
}

/// One recursive-least-squares update with exponential forgetting.
/// P drifts off Hermitian in floating point, so it is re-symmetrized
/// after every step.
inline AdaptiveState rls_step(const AdaptiveState& state, std::span<const cplx> x,
                              std::span<const cplx> y) {
    AdaptiveState next = state;
    const std::size_t m = state.w.rows();
    const std::size_t n = state.w.cols();
    if (x.size() != m || y.size() != n)
        throw Error("rls_step: dimension mismatch");
    if (state.p.rows() != n || state.p.cols() != n)
        throw Error("rls_step: P not initialized");

    const double il = 1.0 / state.lambda;

    // k = (P y / lambda) / (1 + y^H P y / lambda)
    cvec py = matvec(state.p, y);
    const double denom = 1.0 + il * dot_conj(y, py).real();
    cvec k(n);
    for (std::size_t j = 0; j < n; ++j)
        k[j] = il * py[j] / denom;

    const cvec est = matvec(state.w, y);
    for (std::size_t i = 0; i < m; ++i) {
        const cplx e = x[i] - est[i];
        for (std::size_t j = 0; j < n; ++j)
            next.w(i, j) += e * std::conj(k[j]);
    }

    // P <- (P - k y^H P) / lambda, then re-Hermitianize.
    cvec yhp(n); // y^H P
    for (std::size_t j = 0; j < n; ++j) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += std::conj(y[i]) * state.p(i, j);
        yhp[j] = acc;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            next.p(i, j) = il * (state.p(i, j) - k[i] * yhp[j]);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const cplx v = 0.5 * (next.p(i, j) + std::conj(next.p(j, i)));
            next.p(i, j) = v;
            next.p(j, i) = std::conj(v);
        }
    }

    ++next.iteration;
    if (next.w.max_abs() > 1e6)
        throw DivergedState("rls_step: weight magnitude exceeded 1e6");
    return next;
}

struct LearnParams {
    ModName constellation = ModName::BPSK;
    double mu = 0.02;
    double lambda = 0.99;
    double pi0 = 100.0;
    int probe_symbols = 200; // held-out block re-detected each iteration
};

namespace detail {

/// One ensemble member: fresh channel, noise and training realization.
/// Returns the per-iteration BER of the evolving weights on a fixed
/// held-out probe block.
inline std::vector<double> learning_curve_member(int m_tx, int n_rx, double snr_db,
                                                 AdaptAlgo algo, const LearnParams& prm,
                                                 int n_train, Rng rng) {
    const Constellation& c = Constellation::by_name(prm.constellation);
    const double noise_var = snr_to_noise_var(snr_db, m_tx);
    const double tx_scale = 1.0 / std::sqrt(static_cast<double>(m_tx));

    const FlatChannel ch = draw_flat(m_tx, n_rx, rng);
    const CMatrix h_eff = ch.h.scaled(tx_scale);

    const std::size_t m = static_cast<std::size_t>(m_tx);
    const std::size_t n = static_cast<std::size_t>(n_rx);
    const std::size_t np = static_cast<std::size_t>(prm.probe_symbols);

    // Fixed probe block: known symbols through the same channel + noise.
    std::vector<std::uint32_t> probe_labels(np * m);
    cvec probe_y(np * n);
    for (std::size_t t = 0; t < np; ++t) {
        cvec x(m);
        for (std::size_t s = 0; s < m; ++s) {
            const std::uint32_t lab = static_cast<std::uint32_t>(rng.below(c.size()));
            probe_labels[t * m + s] = lab;
            x[s] = c.points[lab];
        }
        cvec y = matvec(h_eff, x);
        for (std::size_t i = 0; i < n; ++i)
            probe_y[t * n + i] = y[i] + rng.cgauss(noise_var);
    }

    AdaptiveState st = (algo == AdaptAlgo::Lms)
                           ? AdaptiveState::lms(m, n, prm.mu)
                           : AdaptiveState::rls(m, n, prm.lambda, prm.pi0);

    std::vector<double> curve(static_cast<std::size_t>(n_train));
    const double total_bits = static_cast<double>(np * m) * c.k;
    cvec x(m), y(n);
    for (int it = 0; it < n_train; ++it) {
        for (std::size_t s = 0; s < m; ++s)
            x[s] = c.points[rng.below(c.size())];
        const cvec hx = matvec(h_eff, x);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = hx[i] + rng.cgauss(noise_var);
        st = (algo == AdaptAlgo::Lms) ? lms_step(st, x, y) : rls_step(st, x, y);

        // Instantaneous BER with the weights frozen after this update.
        std::uint64_t errs = 0;
        for (std::size_t t = 0; t < np; ++t) {
            for (std::size_t s = 0; s < m; ++s) {
                cplx stat = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    stat += st.w(s, j) * probe_y[t * n + j];
                const std::uint32_t got =
                    static_cast<std::uint32_t>(slice_index(stat, c));
                std::uint32_t diff = got ^ probe_labels[t * m + s];
                while (diff) {
                    errs += diff & 1u;
                    diff >>= 1;
                }
            }
        }
        curve[static_cast<std::size_t>(it)] = static_cast<double>(errs) / total_bits;
    }
    return curve;
}

} // namespace detail

/// Ensemble-averaged BER learning curve: n_ensemble independent
/// (channel, noise, training) realizations, instantaneous BER measured
/// on a held-out probe block after every training symbol. The result is
/// independent of the worker count.
inline std::vector<double> learning_curve(int m_tx, int n_rx, double snr_db, AdaptAlgo algo,
                                          const LearnParams& prm, int n_train, int n_ensemble,
                                          std::uint64_t seed, int workers = 0) {
    if (n_ensemble < 1)
        throw ConfigError("learning_curve: n_ensemble must be >= 1");
    if (n_train < 1)
        throw ConfigError("learning_curve: n_train must be >= 1");
    if (workers <= 0)
        workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1)
        workers = 1;

    std::vector<std::vector<double>> member(static_cast<std::size_t>(n_ensemble));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int e = w; e < n_ensemble; e += workers)
                member[static_cast<std::size_t>(e)] = detail::learning_curve_member(
                    m_tx, n_rx, snr_db, algo, prm, n_train,
                    Rng::derive(seed, 0xada9u, static_cast<std::uint64_t>(e)));
        });
    }
    for (auto& t : pool)
        t.join();

    // Reduce in member order so the float sum is worker-count invariant.
    std::vector<double> mean(static_cast<std::size_t>(n_train), 0.0);
    for (const auto& mcurve : member)
        for (std::size_t i = 0; i < mean.size(); ++i)
            mean[i] += mcurve[i];
    for (double& v : mean)
        v /= static_cast<double>(n_ensemble);
    return mean;
}

} // namespace detlab

#endif // DETLAB_ADAPT_HPP
