/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef DETLAB_DETECT_HPP
#define DETLAB_DETECT_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "detlab/cmatrix.hpp"
#include "detlab/errors.hpp"
#include "detlab/modem.hpp"

namespace detlab {

enum class WeightKind { ZF, MMSE, MatchedFilter };

/// M x N linear combining matrix; x_hat = slice(w * y) per stream.
struct DetectorWeights {
    CMatrix w;
    WeightKind kind;
};

enum class SicNulling { ZF, MMSE };
enum class SicFirstStage { Same, ML, MRC };

struct SicConfig {
    bool ordering = false;
    SicNulling nulling = SicNulling::ZF;
    SicFirstStage first_stage = SicFirstStage::Same;
};

/// Exhaustive vector search is capped at 2^16 candidates.
inline constexpr std::uint64_t ml_candidate_limit = 1u << 16;

/// Joint maximum-likelihood detection: argmin over all |A|^M candidate
/// vectors of ||y - H x||^2. Ties break toward the lexicographically
/// first candidate (stream 0 index most significant).
inline cvec detect_ml(std::span<const cplx> y, const CMatrix& h, const Constellation& c) {
    const std::size_t m = h.cols();
    const std::size_t n = h.rows();
    if (y.size() != n)
        throw Error("detect_ml: observation length != rows of h");
    std::uint64_t n_cand = 1;
    for (std::size_t s = 0; s < m; ++s) {
        n_cand *= c.size();
        if (n_cand > ml_candidate_limit)
            throw SearchSpaceTooLarge("detect_ml: |A|^M exceeds 2^16 candidates");
    }

    std::vector<std::size_t> idx(m, 0);
    cvec x(m), best_x(m);
    double best_metric = std::numeric_limits<double>::infinity();
    for (std::uint64_t cand = 0; cand < n_cand; ++cand) {
        std::uint64_t rem = cand;
        for (std::size_t s = m; s-- > 0;) {
            idx[s] = static_cast<std::size_t>(rem % c.size());
            rem /= c.size();
        }
        for (std::size_t s = 0; s < m; ++s)
            x[s] = c.points[idx[s]];
        double metric = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx acc = y[i];
            for (std::size_t s = 0; s < m; ++s)
                acc -= h(i, s) * x[s];
            metric += std::norm(acc);
            if (metric >= best_metric)
                break;
        }
        if (metric < best_metric) { // strict: ties keep the earlier candidate
            best_metric = metric;
            best_x = x;
        }
    }
    return best_x;
}

/// Zero-forcing combiner: pseudo-inverse of the channel.
inline DetectorWeights weights_zf(const CMatrix& h) {
    return {pseudo_inverse(h), WeightKind::ZF};
}

/// MMSE combiner ((1/snr) I + H^H H)^-1 H^H; snr is the linear
/// per-stream symbol SNR. Regularization keeps this invertible for any
/// finite snr, even on rank-deficient channels.
inline DetectorWeights weights_mmse(const CMatrix& h, double snr) {
    if (!(snr > 0.0))
        throw ConfigError("weights_mmse: snr must be positive");
    const CMatrix hh = hermitian(h);
    CMatrix gram = matmul(hh, h);
    if (std::isfinite(snr)) {
        const double reg = 1.0 / snr;
        for (std::size_t i = 0; i < gram.rows(); ++i)
            gram(i, i) += reg;
    }
    return {matmul(inverse(gram), hh), WeightKind::MMSE};
}

/// Maximal ratio combining for a single transmit stream: conjugate
/// branch weighting summed over receive antennas.
inline cplx combine_mrc(std::span<const cplx> y, std::span<const cplx> h) {
    if (y.size() != h.size())
        throw Error("combine_mrc: branch count mismatch");
    cplx acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        acc += std::conj(h[i]) * y[i];
    return acc;
}

/// 2x2 Alamouti code block: rows are antennas, columns the two symbol
/// periods. S * S^H = (|s1|^2 + |s2|^2) I.
struct StbcBlock {
    CMatrix s;
};

inline StbcBlock stbc_encode(cplx s1, cplx s2) {
    return {CMatrix::from_rows({{s1, -std::conj(s2)}, {s2, std::conj(s1)}})};
}

/// Orthogonal combining of two symbol periods over N receive antennas.
/// y1, y2 are the period-1/period-2 receive vectors, h is N x 2 and
/// constant over the block. Returns the two sliced symbols.
inline std::pair<cplx, cplx> stbc_decode(std::span<const cplx> y1, std::span<const cplx> y2,
                                         const CMatrix& h, const Constellation& c) {
    const std::size_t n = h.rows();
    if (h.cols() != 2)
        throw ConfigError("stbc_decode: channel must have 2 transmit columns");
    if (y1.size() != n || y2.size() != n)
        throw Error("stbc_decode: observation length != rows of h");
    cplx s1 = 0.0, s2 = 0.0;
    double gain = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const cplx h1 = h(j, 0), h2 = h(j, 1);
        s1 += std::conj(h1) * y1[j] + h2 * std::conj(y2[j]);
        s2 += std::conj(h2) * y1[j] - h1 * std::conj(y2[j]);
        gain += std::norm(h1) + std::norm(h2);
    }
    if (gain > 0.0) {
        s1 /= gain;
        s2 /= gain;
    }
    return {slice(s1, c), slice(s2, c)};
}

/// V-BLAST successive interference cancellation. Each stage computes a
/// nulling matrix on the deflated channel, optionally picks the stream
/// with the best post-detection SNR (smallest nulling-row norm), detects
/// it, subtracts its contribution and repeats. Estimates are returned in
/// original stream order.
inline cvec vblast_sic(std::span<const cplx> y, const CMatrix& h, double snr,
                       const Constellation& c, const SicConfig& cfg) {
    const std::size_t m = h.cols();
    const std::size_t n = h.rows();
    if (y.size() != n)
        throw Error("vblast_sic: observation length != rows of h");
    if (m > n)
        throw SingularMatrix("vblast_sic: more streams than receive antennas");

    cvec yr(y.begin(), y.end());
    CMatrix hr = h;
    std::vector<std::size_t> remaining(m);
    for (std::size_t s = 0; s < m; ++s)
        remaining[s] = s;
    cvec out(m);

    bool first = true;
    while (!remaining.empty()) {
        const DetectorWeights dw = (cfg.nulling == SicNulling::ZF)
                                       ? weights_zf(hr)
                                       : weights_mmse(hr, snr);
        std::size_t pick = 0;
        if (cfg.ordering) {
            double best = norm2(dw.w.row(0));
            for (std::size_t j = 1; j < dw.w.rows(); ++j) {
                const double v = norm2(dw.w.row(j));
                if (v < best) {
                    best = v;
                    pick = j;
                }
            }
        }

        cplx shat;
        if (first && cfg.first_stage == SicFirstStage::ML) {
            const cvec xml = detect_ml(yr, hr, c);
            shat = xml[pick];
        } else if (first && cfg.first_stage == SicFirstStage::MRC) {
            const cvec col = hr.col(pick);
            const double g = norm2(col);
            cplx stat = combine_mrc(yr, col);
            if (g > 0.0)
                stat /= g;
            shat = slice(stat, c);
        } else {
            cplx stat = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                stat += dw.w(pick, j) * yr[j];
            shat = slice(stat, c);
        }

        out[remaining[pick]] = shat;
        for (std::size_t i = 0; i < n; ++i)
            yr[i] -= hr(i, pick) * shat;
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
        if (!remaining.empty())
            hr = hr.without_col(pick);
        first = false;
    }
    return out;
}

/// Detector selection shared by the sweep engine and the CLI.
enum class DetectorKind {
    Ml,
    Zf,
    Mmse,
    Mrc,
    Stbc,
    ZfSic,
    MmseSic,
    ZfSicOrdered,
    MmseSicOrdered,
    SicMlFirst,
    SicMrcFirst,
};

inline DetectorKind detector_from_name(const std::string& s) {
    if (s == "ml") return DetectorKind::Ml;
    if (s == "zf") return DetectorKind::Zf;
    if (s == "mmse") return DetectorKind::Mmse;
    if (s == "mrc") return DetectorKind::Mrc;
    if (s == "stbc") return DetectorKind::Stbc;
    if (s == "zf-sic") return DetectorKind::ZfSic;
    if (s == "mmse-sic") return DetectorKind::MmseSic;
    if (s == "zf-sic-ordered") return DetectorKind::ZfSicOrdered;
    if (s == "mmse-sic-ordered") return DetectorKind::MmseSicOrdered;
    if (s == "sic-ml-first") return DetectorKind::SicMlFirst;
    if (s == "sic-mrc-first") return DetectorKind::SicMrcFirst;
    throw ValidationError("unknown detector '" + s + "'");
}

inline std::string detector_name(DetectorKind k) {
    switch (k) {
    case DetectorKind::Ml: return "ml";
    case DetectorKind::Zf: return "zf";
    case DetectorKind::Mmse: return "mmse";
    case DetectorKind::Mrc: return "mrc";
    case DetectorKind::Stbc: return "stbc";
    case DetectorKind::ZfSic: return "zf-sic";
    case DetectorKind::MmseSic: return "mmse-sic";
    case DetectorKind::ZfSicOrdered: return "zf-sic-ordered";
    case DetectorKind::MmseSicOrdered: return "mmse-sic-ordered";
    case DetectorKind::SicMlFirst: return "sic-ml-first";
    default: return "sic-mrc-first";
    }
}

inline bool detector_is_sic(DetectorKind k) {
    switch (k) {
    case DetectorKind::ZfSic:
    case DetectorKind::MmseSic:
    case DetectorKind::ZfSicOrdered:
    case DetectorKind::MmseSicOrdered:
    case DetectorKind::SicMlFirst:
    case DetectorKind::SicMrcFirst:
        return true;
    default:
        return false;
    }
}

inline SicConfig sic_config(DetectorKind k) {
    switch (k) {
    case DetectorKind::ZfSic: return {false, SicNulling::ZF, SicFirstStage::Same};
    case DetectorKind::MmseSic: return {false, SicNulling::MMSE, SicFirstStage::Same};
    case DetectorKind::ZfSicOrdered: return {true, SicNulling::ZF, SicFirstStage::Same};
    case DetectorKind::MmseSicOrdered: return {true, SicNulling::MMSE, SicFirstStage::Same};
    case DetectorKind::SicMlFirst: return {true, SicNulling::ZF, SicFirstStage::ML};
    case DetectorKind::SicMrcFirst: return {true, SicNulling::ZF, SicFirstStage::MRC};
    default: throw ConfigError("sic_config: not a SIC detector");
    }
}

/// One flat-fading vector detection, dispatched by kind. The channel is
/// the effective one seen by unit-energy constellation symbols (any
/// transmit power split is already folded in). STBC spans two symbol
/// periods and is handled by the caller, not here.
struct Detector {
    DetectorKind kind = DetectorKind::Zf;
    double snr_linear = 1.0;

    cvec detect(std::span<const cplx> y, const CMatrix& h_eff, const Constellation& c) const {
        switch (kind) {
        case DetectorKind::Ml:
            return detect_ml(y, h_eff, c);
        case DetectorKind::Zf: {
            const DetectorWeights dw = weights_zf(h_eff);
            return slice_streams(matvec(dw.w, y), c);
        }
        case DetectorKind::Mmse: {
            const DetectorWeights dw = weights_mmse(h_eff, snr_linear);
            return slice_streams(matvec(dw.w, y), c);
        }
        case DetectorKind::Mrc: {
            if (h_eff.cols() != 1)
                throw ConfigError("mrc detector requires a single stream (m_tx = 1)");
            const cvec h = h_eff.col(0);
            const double g = norm2(h);
            cplx stat = combine_mrc(y, h);
            if (g > 0.0)
                stat /= g;
            return {slice(stat, c)};
        }
        case DetectorKind::Stbc:
            throw ConfigError("stbc detection spans two symbol periods; use stbc_decode");
        default:
            return vblast_sic(y, h_eff, snr_linear, c, sic_config(kind));
        }
    }

  private:
    static cvec slice_streams(cvec stats, const Constellation& c) {
        for (cplx& s : stats)
            s = slice(s, c);
        return stats;
    }
};

} // namespace detlab

#endif // DETLAB_DETECT_HPP
