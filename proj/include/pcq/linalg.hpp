#pragma once

// Small dense least-squares solver (Householder QR). Design matrices in
// this project have at most a handful of columns, so nothing fancier is
// needed.

#include <cmath>
#include <cstddef>
#include <vector>

#include "pcq/errors.hpp"

namespace pcq {

// Row-major dense matrix.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const {
        return a[i * cols + j];
    }
};

// Minimizes ||A x - b||_2 for each right-hand-side column of B.
// Returns a cols(A) x cols(B) solution matrix. Throws rank_deficient when
// a diagonal of R collapses.
inline Matrix least_squares(Matrix a, Matrix b) {
    const std::size_t m = a.rows, n = a.cols, p = b.cols;
    if (b.rows != m) throw shape_mismatch("rhs row count mismatch");
    if (m < n) throw rank_deficient("fewer rows than unknowns");

    double scale = 0.0;
    for (double v : a.a) scale = std::max(scale, std::abs(v));
    const double tol = 1e-12 * std::max(scale, 1.0) * double(std::max(m, n));

    // Householder QR applied in place to [A | B].
    std::vector<double> v(m);
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += a(i, k) * a(i, k);
        norm = std::sqrt(norm);
        if (norm <= tol) throw rank_deficient("design matrix is rank deficient");
        if (a(k, k) > 0) norm = -norm;
        for (std::size_t i = k; i < m; ++i) v[i] = a(i, k);
        v[k] -= norm;
        double vtv = 0.0;
        for (std::size_t i = k; i < m; ++i) vtv += v[i] * v[i];
        if (vtv == 0.0) continue;
        auto reflect = [&](Matrix& mat, std::size_t cols) {
            for (std::size_t j = 0; j < cols; ++j) {
                double dot = 0.0;
                for (std::size_t i = k; i < m; ++i) dot += v[i] * mat(i, j);
                const double f = 2.0 * dot / vtv;
                for (std::size_t i = k; i < m; ++i) mat(i, j) -= f * v[i];
            }
        };
        reflect(a, n);
        reflect(b, p);
        a(k, k) = norm; // clean column
        for (std::size_t i = k + 1; i < m; ++i) a(i, k) = 0.0;
    }

    // Back substitution on R x = Q^T b.
    Matrix x(n, p);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t ii = n; ii-- > 0;) {
            double s = b(ii, j);
            for (std::size_t kk = ii + 1; kk < n; ++kk)
                s -= a(ii, kk) * x(kk, j);
            x(ii, j) = s / a(ii, ii);
        }
    }
    return x;
}

inline std::vector<double> least_squares(const Matrix& a,
                                         const std::vector<double>& b) {
    Matrix rhs(b.size(), 1);
    for (std::size_t i = 0; i < b.size(); ++i) rhs(i, 0) = b[i];
    Matrix x = least_squares(a, std::move(rhs));
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = x(i, 0);
    return out;
}

} // namespace pcq
