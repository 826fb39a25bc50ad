#pragma once

// Small dense linear algebra: Cholesky factorization, triangular solves,
// and a cyclic Jacobi eigen-solver for symmetric matrices.

#include <har/core.hpp>

#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace har::linalg {

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix,
/// or nullopt when a pivot is not strictly positive.
inline std::optional<Matrix> cholesky(const Matrix& a) {
    require(a.rows == a.cols, "dimension_mismatch", "cholesky: matrix must be square");
    const std::size_t n = a.rows;
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            diag -= l(j, k) * l(j, k);
        }
        if (!(diag > 0.0) || !std::isfinite(diag)) {
            return std::nullopt;
        }
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double sum = a(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                sum -= l(i, k) * l(j, k);
            }
            l(i, j) = sum / l(j, j);
        }
    }
    return l;
}

/// Solves L y = b for lower-triangular L.
inline std::vector<double> forward_solve(const Matrix& l, std::span<const double> b) {
    const std::size_t n = l.rows;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) {
            sum -= l(i, k) * y[k];
        }
        y[i] = sum / l(i, i);
    }
    return y;
}

/// Solves L^T x = y for lower-triangular L.
inline std::vector<double> backward_solve_transposed(const Matrix& l, std::span<const double> y) {
    const std::size_t n = l.rows;
    std::vector<double> x(n);
    for (std::size_t ii = n; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        double sum = y[i];
        for (std::size_t k = i + 1; k < n; ++k) {
            sum -= l(k, i) * x[k];
        }
        x[i] = sum / l(i, i);
    }
    return x;
}

inline double log_determinant_from_cholesky(const Matrix& l) {
    double sum = 0.0;
    for (std::size_t i = 0; i < l.rows; ++i) {
        sum += std::log(l(i, i));
    }
    return 2.0 * sum;
}

inline double trace(const Matrix& a) {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(a.rows, a.cols); ++i) {
        t += a(i, i);
    }
    return t;
}

struct Regularized {
    Matrix matrix;    // a + lambda I
    Matrix cholesky;  // its lower factor
    double lambda = 0.0;
};

/// Adds lambda I with lambda = 1e-6 * trace/d, growing lambda tenfold until
/// the result admits a Cholesky factorization.
inline Regularized regularize_spd(const Matrix& a) {
    const std::size_t d = a.rows;
    double lambda = 1e-6 * trace(a) / static_cast<double>(d);
    if (!(lambda > 0.0)) {
        lambda = 1e-9;
    }
    for (int attempt = 0; attempt < 40; ++attempt, lambda *= 10.0) {
        Matrix reg = a;
        for (std::size_t i = 0; i < d; ++i) {
            reg(i, i) += lambda;
        }
        if (auto l = cholesky(reg)) {
            return {std::move(reg), std::move(*l), lambda};
        }
    }
    throw Error("numerical", "covariance could not be regularized to positive definite");
}

struct EigenResult {
    std::vector<double> values;  // descending
    Matrix vectors;              // columns are eigenvectors
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Eigenpairs are
/// returned sorted by descending eigenvalue.
inline EigenResult jacobi_eigen(Matrix a, int max_sweeps = 100) {
    require(a.rows == a.cols, "dimension_mismatch", "jacobi_eigen: matrix must be square");
    const std::size_t n = a.rows;
    Matrix v = Matrix::identity(n);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                total += a(i, j) * a(i, j);
                if (i != j) {
                    off += a(i, j) * a(i, j);
                }
            }
        }
        if (off <= 1e-30 * total || off == 0.0) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenResult result;
    result.values.resize(n);
    result.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        result.values[j] = a(order[j], order[j]);
        for (std::size_t k = 0; k < n; ++k) {
            result.vectors(k, j) = v(k, order[j]);
        }
    }
    return result;
}

inline std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
    require(a.cols == x.size(), "dimension_mismatch", "matrix-vector dimension mismatch");
    std::vector<double> y(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < a.cols; ++j) {
            y[i] += a(i, j) * x[j];
        }
    }
    return y;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

inline double norm(std::span<const double> a) {
    return std::sqrt(dot(a, a));
}

}  // namespace har::linalg
