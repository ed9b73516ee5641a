/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef DETLAB_MODEM_HPP
#define DETLAB_MODEM_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "detlab/cmatrix.hpp"
#include "detlab/errors.hpp"

namespace detlab {

using bitvec = std::vector<std::uint8_t>;

enum class ModName { BPSK, QPSK, QAM16 };

/// Gray-labelled constellation with unit average symbol energy.
/// points[i] carries label i (k bits, MSB first within the label).
struct Constellation {
    ModName name;
    int k; // bits per symbol
    std::vector<cplx> points;
    std::vector<std::uint32_t> labels; // labels[i] == i by construction

    std::size_t size() const { return points.size(); }

    static const Constellation& bpsk();
    static const Constellation& qpsk();
    static const Constellation& qam16();
    static const Constellation& by_name(ModName n);
    static const Constellation& by_name(const std::string& n);
};

namespace detail {

inline Constellation make_bpsk() {
    Constellation c;
    c.name = ModName::BPSK;
    c.k = 1;
    c.points = {cplx(1.0, 0.0), cplx(-1.0, 0.0)}; // bit 0 -> +1, 1 -> -1
    c.labels = {0, 1};
    return c;
}

inline Constellation make_qpsk() {
    Constellation c;
    c.name = ModName::QPSK;
    c.k = 2;
    const double s = 1.0 / std::sqrt(2.0);
    c.points.resize(4);
    c.labels.resize(4);
    for (std::uint32_t lab = 0; lab < 4; ++lab) {
        // First bit picks the I sign, second the Q sign; 0 is positive.
        const double i = (lab & 2u) ? -s : s;
        const double q = (lab & 1u) ? -s : s;
        c.points[lab] = cplx(i, q);
        c.labels[lab] = lab;
    }
    return c;
}

// Gray PAM4 axis: 00->+3, 01->+1, 11->-1, 10->-3.
inline double pam4_gray(std::uint32_t two_bits) {
    switch (two_bits) {
    case 0: return 3.0;
    case 1: return 1.0;
    case 3: return -1.0;
    default: return -3.0; // 2
    }
}

inline Constellation make_qam16() {
    Constellation c;
    c.name = ModName::QAM16;
    c.k = 4;
    const double s = 1.0 / std::sqrt(10.0);
    c.points.resize(16);
    c.labels.resize(16);
    for (std::uint32_t lab = 0; lab < 16; ++lab) {
        const double i = pam4_gray((lab >> 2) & 3u) * s;
        const double q = pam4_gray(lab & 3u) * s;
        c.points[lab] = cplx(i, q);
        c.labels[lab] = lab;
    }
    return c;
}

} // namespace detail

inline const Constellation& Constellation::bpsk() {
    static const Constellation c = detail::make_bpsk();
    return c;
}
inline const Constellation& Constellation::qpsk() {
    static const Constellation c = detail::make_qpsk();
    return c;
}
inline const Constellation& Constellation::qam16() {
    static const Constellation c = detail::make_qam16();
    return c;
}
inline const Constellation& Constellation::by_name(ModName n) {
    switch (n) {
    case ModName::BPSK: return bpsk();
    case ModName::QPSK: return qpsk();
    default: return qam16();
    }
}
inline const Constellation& Constellation::by_name(const std::string& n) {
    if (n == "bpsk")
        return bpsk();
    if (n == "qpsk")
        return qpsk();
    if (n == "qam16")
        return qam16();
    throw ValidationError("unknown constellation '" + n + "' (bpsk|qpsk|qam16)");
}

inline std::string to_string(ModName n) {
    switch (n) {
    case ModName::BPSK: return "bpsk";
    case ModName::QPSK: return "qpsk";
    default: return "qam16";
    }
}

/// Map bits (k per symbol, MSB first) onto constellation symbols.
inline cvec modulate(std::span<const std::uint8_t> bits, const Constellation& c) {
    if (bits.size() % static_cast<std::size_t>(c.k) != 0)
        throw LengthMismatch("modulate: bit count not divisible by bits/symbol");
    cvec out(bits.size() / c.k);
    for (std::size_t s = 0; s < out.size(); ++s) {
        std::uint32_t lab = 0;
        for (int b = 0; b < c.k; ++b)
            lab = (lab << 1) | (bits[s * c.k + b] & 1u);
        out[s] = c.points[lab];
    }
    return out;
}

/// Index of the nearest constellation point; ties go to the lowest index.
inline std::size_t slice_index(cplx y, const Constellation& c) {
    std::size_t best = 0;
    double bestd = std::norm(y - c.points[0]);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        const double d = std::norm(y - c.points[i]);
        if (d < bestd) {
            bestd = d;
            best = i;
        }
    }
    return best;
}

/// Hard decision: nearest constellation point.
inline cplx slice(cplx y, const Constellation& c) {
    return c.points[slice_index(y, c)];
}

inline void append_label_bits(std::uint32_t lab, int k, bitvec& out) {
    for (int b = k - 1; b >= 0; --b)
        out.push_back(static_cast<std::uint8_t>((lab >> b) & 1u));
}

/// Slice each symbol and emit its label bits.
inline bitvec demodulate(std::span<const cplx> symbols, const Constellation& c) {
    bitvec out;
    out.reserve(symbols.size() * c.k);
    for (const cplx& y : symbols)
        append_label_bits(static_cast<std::uint32_t>(slice_index(y, c)), c.k, out);
    return out;
}

} // namespace detlab

#endif // DETLAB_MODEM_HPP
