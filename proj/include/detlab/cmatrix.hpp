/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef DETLAB_CMATRIX_HPP
#define DETLAB_CMATRIX_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "detlab/errors.hpp"

namespace detlab {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Dense complex matrix, row-major. Small (antenna-count sized) by design;
/// every detector in the library goes through this kernel.
class CMatrix {
  public:
    CMatrix() = default; // empty placeholder, 0x0

    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), e_(rows * cols) {
        if (rows == 0 || cols == 0)
            throw Error("CMatrix: dimensions must be >= 1");
    }

    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
        : rows_(rows), cols_(cols), e_(std::move(entries)) {
        if (rows == 0 || cols == 0)
            throw Error("CMatrix: dimensions must be >= 1");
        if (e_.size() != rows * cols)
            throw Error("CMatrix: entry count does not match dimensions");
        for (const cplx& v : e_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw Error("CMatrix: non-finite entry");
    }

    /// Row-of-rows constructor, for literals in tests and small fixtures.
    static CMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
        std::size_t r = rows.size();
        std::size_t c = rows.begin()->size();
        std::vector<cplx> e;
        e.reserve(r * c);
        for (const auto& row : rows) {
            if (row.size() != c)
                throw Error("CMatrix::from_rows: ragged rows");
            for (const cplx& v : row)
                e.push_back(v);
        }
        return CMatrix(r, c, std::move(e));
    }

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return e_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    std::span<const cplx> row(std::size_t i) const {
        return std::span<const cplx>(e_.data() + i * cols_, cols_);
    }

    cvec col(std::size_t j) const {
        cvec v(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            v[i] = (*this)(i, j);
        return v;
    }

    /// Copy with column j removed (SIC deflation).
    CMatrix without_col(std::size_t j) const {
        CMatrix m(rows_, cols_ - 1);
        for (std::size_t i = 0; i < rows_; ++i) {
            std::size_t t = 0;
            for (std::size_t k = 0; k < cols_; ++k) {
                if (k == j)
                    continue;
                m(i, t++) = (*this)(i, k);
            }
        }
        return m;
    }

    CMatrix scaled(cplx s) const {
        CMatrix m = *this;
        for (cplx& v : m.e_)
            v *= s;
        return m;
    }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& v : e_)
            m = std::max(m, std::abs(v));
        return m;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> e_;
};

/// Conjugate transpose.
inline CMatrix hermitian(const CMatrix& a) {
    CMatrix m(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m(j, i) = std::conj(a(i, j));
    return m;
}

inline CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows())
        throw Error("matmul: dimension mismatch");
    CMatrix m(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                m(i, j) += aik * b(k, j);
        }
    return m;
}

inline CMatrix add(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error("add: dimension mismatch");
    CMatrix m = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m(i, j) += b(i, j);
    return m;
}

inline CMatrix sub(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error("sub: dimension mismatch");
    CMatrix m = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m(i, j) -= b(i, j);
    return m;
}

inline cvec matvec(const CMatrix& a, std::span<const cplx> x) {
    if (a.cols() != x.size())
        throw Error("matvec: dimension mismatch");
    cvec y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j)
            acc += a(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

inline cplx dot_conj(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size())
        throw Error("dot_conj: dimension mismatch");
    cplx acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::conj(a[i]) * b[i];
    return acc;
}

inline double norm2(std::span<const cplx> v) {
    double s = 0.0;
    for (const cplx& x : v)
        s += std::norm(x);
    return s;
}

/// Pivot magnitude below this during elimination means the matrix is
/// singular for our purposes; Rayleigh draws are almost surely full rank,
/// so hitting it signals a degenerate (usually test-constructed) channel.
inline constexpr double singular_pivot_threshold = 1e-12;

/// Square inverse by Gauss-Jordan elimination with partial pivoting.
inline CMatrix inverse(const CMatrix& a) {
    if (a.rows() != a.cols())
        throw Error("inverse: matrix not square");
    const std::size_t n = a.rows();
    CMatrix w = a;
    CMatrix inv = CMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(w(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            double v = std::abs(w(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < singular_pivot_threshold)
            throw SingularMatrix("inverse: pivot below threshold");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(w(piv, j), w(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        }
        const cplx d = w(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            w(col, j) /= d;
            inv(col, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col)
                continue;
            const cplx f = w(r, col);
            if (f == cplx{})
                continue;
            for (std::size_t j = 0; j < n; ++j) {
                w(r, j) -= f * w(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

/// Left pseudo-inverse (A^H A)^-1 A^H for full-column-rank A (cols <= rows).
inline CMatrix pseudo_inverse(const CMatrix& a) {
    if (a.cols() > a.rows())
        throw SingularMatrix("pseudo_inverse: more columns than rows");
    const CMatrix ah = hermitian(a);
    const CMatrix gram = matmul(ah, a);
    return matmul(inverse(gram), ah);
}

/// Largest eigenvalue of a Hermitian PSD matrix by power iteration.
inline double max_eigenvalue_hermitian(const CMatrix& a) {
    if (a.rows() != a.cols())
        throw NonHermitian("max_eigenvalue_hermitian: matrix not square");
    const std::size_t n = a.rows();
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            asym = std::max(asym, std::abs(a(i, j) - std::conj(a(j, i))));
    if (asym > 1e-9)
        throw NonHermitian("max_eigenvalue_hermitian: asymmetry above 1e-9");

    // Deterministic start with unequal components so no eigenvector of a
    // generic matrix is exactly orthogonal to it.
    cvec v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = cplx(1.0 + 0.1 * static_cast<double>(i), 0.0);
    double vn = std::sqrt(norm2(v));
    for (cplx& x : v)
        x /= vn;

    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        cvec av = matvec(a, v);
        const double avn = std::sqrt(norm2(av));
        if (avn == 0.0)
            return 0.0; // zero matrix (or v in the null space of a PSD a)
        double rq = dot_conj(v, av).real();
        for (cplx& x : av)
            x /= avn;
        v = std::move(av);
        if (it > 0 && std::abs(rq - lambda) <= 1e-8 * std::max(std::abs(rq), 1e-300)) {
            lambda = rq;
            break;
        }
        lambda = rq;
    }
    return std::max(lambda, 0.0);
}

} // namespace detlab

#endif // DETLAB_CMATRIX_HPP
