#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "spatnn/errors.hpp"

namespace spatnn {

/// Small dense matrix, row-major. Everything in this toolkit is at most
/// q^2 x q^2 with q around a dozen, so no attempt is made at being clever.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t d) {
        Matrix m(d, d);
        for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    const std::vector<double>& data() const { return a_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    bool is_finite() const {
        for (double v : a_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

inline double quadratic_form(const std::vector<double>& y, const Matrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) row += m(i, j) * y[j];
        s += y[i] * row;
    }
    return s;
}

struct EigenDecomposition {
    std::vector<double> values;  // descending
    Matrix vectors;              // columns are eigenvectors, orthonormal
};

/// Cyclic Jacobi eigensolver for symmetric matrices. The input is symmetrized
/// (averaged with its transpose) so tiny asymmetries from accumulation do not
/// leak into the result.
inline EigenDecomposition sym_eigen(const Matrix& m_in) {
    if (m_in.rows() != m_in.cols() || m_in.rows() == 0)
        throw invalid_input("sym_eigen: matrix must be square and non-empty");
    if (!m_in.is_finite()) throw invalid_input("sym_eigen: non-finite entries");
    const std::size_t d = m_in.rows();
    Matrix a(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) a(i, j) = 0.5 * (m_in(i, j) + m_in(j, i));
    Matrix v = Matrix::identity(d);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) off += a(i, j) * a(i, j);
        if (off <= 1e-30 * std::max(1.0, a.max_abs() * a.max_abs())) break;
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> diag(d);
    for (std::size_t i = 0; i < d; ++i) diag[i] = a(i, i);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return diag[i] > diag[j]; });

    EigenDecomposition e;
    e.values.resize(d);
    e.vectors = Matrix(d, d);
    for (std::size_t c = 0; c < d; ++c) {
        e.values[c] = diag[order[c]];
        for (std::size_t r = 0; r < d; ++r) e.vectors(r, c) = v(r, order[c]);
    }
    return e;
}

struct PseudoInverse {
    Matrix inv;
    std::size_t rank = 0;
    double condition = 0.0;  // |lambda_max| / smallest kept |lambda|
};

/// Moore-Penrose inverse via the spectral decomposition; eigenvalues with
/// |lambda| < rel_tol * max|lambda| are treated as zero.
inline PseudoInverse pseudo_inverse(const Matrix& m, double rel_tol = 1e-8) {
    const auto e = sym_eigen(m);
    const std::size_t d = m.rows();
    double lmax = 0.0;
    for (double l : e.values) lmax = std::max(lmax, std::abs(l));
    const double cut = rel_tol * lmax;

    PseudoInverse out;
    out.inv = Matrix(d, d);
    double lmin_kept = lmax;
    for (std::size_t k = 0; k < d; ++k) {
        const double l = e.values[k];
        if (std::abs(l) <= cut || l == 0.0) continue;
        ++out.rank;
        lmin_kept = std::min(lmin_kept, std::abs(l));
        const double w = 1.0 / l;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                out.inv(i, j) += w * e.vectors(i, k) * e.vectors(j, k);
    }
    out.condition = out.rank ? lmax / lmin_kept : 0.0;
    return out;
}

/// Symmetric pseudo-root M^{-1/2}; requires PSD input up to tolerance.
inline Matrix matrix_inv_sqrt(const Matrix& m, double rel_tol = 1e-8) {
    const auto e = sym_eigen(m);
    const std::size_t d = m.rows();
    double lmax = 0.0;
    for (double l : e.values) lmax = std::max(lmax, std::abs(l));
    for (double l : e.values)
        if (l < -1e-6 * std::max(lmax, 1.0))
            throw invalid_input("matrix_inv_sqrt: matrix has a significantly negative eigenvalue");
    Matrix out(d, d);
    for (std::size_t k = 0; k < d; ++k) {
        const double l = e.values[k];
        if (l <= rel_tol * lmax || l <= 0.0) continue;
        const double w = 1.0 / std::sqrt(l);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                out(i, j) += w * e.vectors(i, k) * e.vectors(j, k);
    }
    return out;
}

namespace detail {

// Regularized incomplete gamma functions, series + continued fraction.
inline double gamma_p_series(double a, double x) {
    double sum = 1.0 / a, term = sum, ap = a;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace detail

/// Upper-tail probability of the standard normal.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// Upper-tail probability of the chi-square distribution with integer df.
inline double chi2_sf(double x, int df) {
    if (df < 1) throw invalid_input("chi2_sf: df must be >= 1");
    if (!(x >= 0.0)) throw invalid_input("chi2_sf: statistic must be >= 0");
    if (x == 0.0) return 1.0;
    const double a = 0.5 * df, hx = 0.5 * x;
    return hx < a + 1.0 ? 1.0 - detail::gamma_p_series(a, hx) : detail::gamma_q_cf(a, hx);
}

/// p-values are reported in [1e-16, 1]; the display layer renders values
/// below 1e-4 as "<.0001" to match conventional tables.
inline double clamp_pvalue(double p) { return std::min(1.0, std::max(1e-16, p)); }

} // namespace spatnn
