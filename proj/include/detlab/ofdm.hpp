/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef DETLAB_OFDM_HPP
#define DETLAB_OFDM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "detlab/channel.hpp"
#include "detlab/cmatrix.hpp"
#include "detlab/detect.hpp"
#include "detlab/errors.hpp"
#include "detlab/modem.hpp"

namespace detlab {

/// 802.11a/g-like numerology: 64 subcarriers, 16-sample cyclic prefix,
/// 40 ns samples (25 MHz), so the prefix spans 640 ns.
struct OfdmParams {
    int n_fft = 64;
    int cp_len = 16;
    double sample_period = 40e-9;

    void validate() const {
        if (n_fft < 2 || (n_fft & (n_fft - 1)) != 0)
            throw ConfigError("OfdmParams: n_fft must be a power of two >= 2");
        if (cp_len < 0 || cp_len >= n_fft)
            throw ConfigError("OfdmParams: cp_len must satisfy 0 <= cp_len < n_fft");
        if (sample_period <= 0.0)
            throw ConfigError("OfdmParams: sample_period must be positive");
    }
};

/// In-place unitary radix-2 FFT (inverse = conjugate direction). Both
/// directions scale by 1/sqrt(n) so transform round trips are exact and
/// signal power is preserved across domains.
inline void fft_unitary(std::span<cplx> a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw Error("fft_unitary: length must be a power of two");
    // bit reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (cplx& x : a)
        x *= scale;
}

/// Prepend the last cp_len samples of an OFDM symbol.
inline cvec add_cp(std::span<const cplx> sym, int cp_len) {
    if (cp_len < 0 || static_cast<std::size_t>(cp_len) >= sym.size())
        throw ConfigError("add_cp: cp_len must satisfy 0 <= cp_len < n_fft");
    cvec out;
    out.reserve(sym.size() + static_cast<std::size_t>(cp_len));
    out.insert(out.end(), sym.end() - cp_len, sym.end());
    out.insert(out.end(), sym.begin(), sym.end());
    return out;
}

inline cvec remove_cp(std::span<const cplx> sym_with_cp, int cp_len) {
    if (cp_len < 0 || static_cast<std::size_t>(cp_len) >= sym_with_cp.size())
        throw ConfigError("remove_cp: bad cp_len");
    return cvec(sym_with_cp.begin() + cp_len, sym_with_cp.end());
}

/// Per-subcarrier flat channels: H_k[i,j] is the length-n_fft DFT of the
/// (i,j) link impulse response evaluated at bin k.
inline std::vector<CMatrix> channel_to_subcarriers(const TappedChannel& ch,
                                                   const OfdmParams& params) {
    params.validate();
    const std::size_t l_taps = ch.taps.size();
    if (l_taps > static_cast<std::size_t>(params.cp_len) + 1)
        throw CpTooShort("channel_to_subcarriers: impulse response longer than cp_len + 1");
    const std::size_t n_fft = static_cast<std::size_t>(params.n_fft);
    const std::size_t n = ch.taps[0].rows();
    const std::size_t m = ch.taps[0].cols();

    std::vector<CMatrix> sub;
    sub.reserve(n_fft);
    for (std::size_t k = 0; k < n_fft; ++k) {
        CMatrix hk(n, m);
        for (std::size_t l = 0; l < l_taps; ++l) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                               static_cast<double>(l) / static_cast<double>(n_fft);
            const cplx tw(std::cos(ang), std::sin(ang));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    hk(i, j) += ch.taps[l](i, j) * tw;
        }
        sub.push_back(std::move(hk));
    }
    return sub;
}

/// Payload bits plus framing counts for one transmission.
struct Packet {
    bitvec payload_bits;
    int n_train = 0; // known training OFDM symbols per stream
    int streams = 1;
};

namespace detail {

/// Deterministic training grid entry for (stream, ofdm symbol, subcarrier).
inline cplx training_point(const Constellation& c, int stream, int t, int k) {
    const std::uint64_t h = mix64(mix64(0x7121u + static_cast<std::uint64_t>(stream)) ^
                                  mix64((static_cast<std::uint64_t>(t) << 20) +
                                        static_cast<std::uint64_t>(k)));
    return c.points[h % c.size()];
}

} // namespace detail

/// Bits -> per-antenna time-domain sample streams. The payload is split
/// into contiguous per-stream chunks; stream s, data symbol t, subcarrier
/// k carries that stream's symbol t*n_fft + k. All subcarriers carry
/// data. Training symbols, when requested, are prepended as whole OFDM
/// symbols with a fixed known grid.
inline std::vector<cvec> ofdm_transmit(const Packet& packet, const Constellation& c,
                                       const OfdmParams& params, int m_tx) {
    params.validate();
    if (packet.streams != m_tx)
        throw ConfigError("ofdm_transmit: packet streams != m_tx");
    const std::size_t n_fft = static_cast<std::size_t>(params.n_fft);
    const std::size_t block = static_cast<std::size_t>(c.k) * static_cast<std::size_t>(m_tx) * n_fft;
    if (packet.payload_bits.empty() || packet.payload_bits.size() % block != 0)
        throw LengthMismatch("ofdm_transmit: payload must be a positive multiple of k*M*n_fft bits");

    const std::size_t per_stream_bits = packet.payload_bits.size() / static_cast<std::size_t>(m_tx);
    const std::size_t n_data_syms = per_stream_bits / (static_cast<std::size_t>(c.k) * n_fft);
    const std::size_t n_syms = n_data_syms + static_cast<std::size_t>(packet.n_train);

    std::vector<cvec> out(static_cast<std::size_t>(m_tx));
    for (int s = 0; s < m_tx; ++s) {
        const std::size_t su = static_cast<std::size_t>(s);
        std::span<const std::uint8_t> chunk(packet.payload_bits.data() + su * per_stream_bits,
                                            per_stream_bits);
        const cvec syms = modulate(chunk, c);
        cvec& stream = out[su];
        stream.reserve(n_syms * (n_fft + static_cast<std::size_t>(params.cp_len)));
        for (std::size_t t = 0; t < n_syms; ++t) {
            cvec grid(n_fft);
            if (t < static_cast<std::size_t>(packet.n_train)) {
                for (std::size_t k = 0; k < n_fft; ++k)
                    grid[k] = detail::training_point(c, s, static_cast<int>(t),
                                                     static_cast<int>(k));
            } else {
                const std::size_t d = t - static_cast<std::size_t>(packet.n_train);
                for (std::size_t k = 0; k < n_fft; ++k)
                    grid[k] = syms[d * n_fft + k];
            }
            fft_unitary(grid, true); // IDFT to time domain
            const cvec with_cp = add_cp(grid, params.cp_len);
            stream.insert(stream.end(), with_cp.begin(), with_cp.end());
        }
    }
    return out;
}

/// Remove CP, DFT, then run the flat-fading detector independently on
/// every subcarrier. ch_sub must describe the channel the samples
/// actually went through (perfect CSI), including any transmit scaling.
inline bitvec ofdm_receive(const std::vector<cvec>& samples, const std::vector<CMatrix>& ch_sub,
                           const Detector& det, const OfdmParams& params, const Constellation& c,
                           int n_train = 0) {
    params.validate();
    const std::size_t n_fft = static_cast<std::size_t>(params.n_fft);
    const std::size_t sym_len = n_fft + static_cast<std::size_t>(params.cp_len);
    if (ch_sub.size() != n_fft)
        throw ConfigError("ofdm_receive: need one channel matrix per subcarrier");
    const std::size_t n_rx = samples.size();
    if (n_rx == 0 || samples[0].size() % sym_len != 0)
        throw LengthMismatch("ofdm_receive: sample stream not a whole number of OFDM symbols");
    const std::size_t n_syms = samples[0].size() / sym_len;
    if (n_syms < static_cast<std::size_t>(n_train))
        throw LengthMismatch("ofdm_receive: fewer symbols than training length");
    const std::size_t n_data = n_syms - static_cast<std::size_t>(n_train);
    const std::size_t m_tx = ch_sub[0].cols();

    // Frequency-domain grid per receive antenna, data symbols only.
    std::vector<cvec> freq(n_rx);
    for (std::size_t a = 0; a < n_rx; ++a) {
        if (samples[a].size() != samples[0].size())
            throw LengthMismatch("ofdm_receive: antenna streams differ in length");
        freq[a].resize(n_data * n_fft);
        for (std::size_t t = 0; t < n_data; ++t) {
            const std::size_t off = (t + static_cast<std::size_t>(n_train)) * sym_len;
            cvec sym = remove_cp(
                std::span<const cplx>(samples[a].data() + off, sym_len), params.cp_len);
            fft_unitary(sym, false);
            std::copy(sym.begin(), sym.end(), freq[a].begin() + static_cast<std::ptrdiff_t>(t * n_fft));
        }
    }

    // Detect per subcarrier; reassemble per-stream bit chunks in the
    // transmit order (stream-major, then symbol, then subcarrier).
    const std::size_t bits_per_stream = n_data * n_fft * static_cast<std::size_t>(c.k);
    bitvec bits(m_tx * bits_per_stream);
    cvec y(n_rx);
    for (std::size_t t = 0; t < n_data; ++t) {
        for (std::size_t k = 0; k < n_fft; ++k) {
            for (std::size_t a = 0; a < n_rx; ++a)
                y[a] = freq[a][t * n_fft + k];
            const cvec xhat = det.detect(y, ch_sub[k], c);
            for (std::size_t s = 0; s < m_tx; ++s) {
                const std::uint32_t lab = static_cast<std::uint32_t>(slice_index(xhat[s], c));
                const std::size_t bit_off =
                    s * bits_per_stream + (t * n_fft + k) * static_cast<std::size_t>(c.k);
                for (int b = 0; b < c.k; ++b)
                    bits[bit_off + static_cast<std::size_t>(b)] =
                        static_cast<std::uint8_t>((lab >> (c.k - 1 - b)) & 1u);
            }
        }
    }
    return bits;
}

/// Linear convolution of per-antenna transmit streams with the tapped
/// channel: y_rx[n] = sum_tx sum_l taps[l][rx,tx] x_tx[n-l].
inline std::vector<cvec> apply_tapped_channel(const std::vector<cvec>& tx,
                                              const TappedChannel& ch) {
    const std::size_t m = tx.size();
    if (m != static_cast<std::size_t>(ch.m_tx))
        throw ConfigError("apply_tapped_channel: stream count mismatch");
    const std::size_t n_samp = tx[0].size();
    const std::size_t n = static_cast<std::size_t>(ch.n_rx);
    const std::size_t l_taps = ch.taps.size();
    std::vector<cvec> rx(n, cvec(n_samp));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t l = 0; l < l_taps; ++l) {
                const cplx g = ch.taps[l](i, j);
                if (g == cplx{})
                    continue;
                for (std::size_t t = l; t < n_samp; ++t)
                    rx[i][t] += g * tx[j][t - l];
            }
        }
    }
    return rx;
}

} // namespace detlab

#endif // DETLAB_OFDM_HPP
