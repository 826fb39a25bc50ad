#pragma once

// RBF-kernel support vector machine trained on the dual by sequential
// minimal optimization, plus the one-against-all multiclass wrapper.

#include <har/labeled_set.hpp>
#include <har/qda.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace har {

inline constexpr double kSvmTolerance = 1e-3;
inline constexpr double kSvmAlphaEpsilon = 1e-8;
inline constexpr double kDefaultBoxConstraint = 10.0;

/// K(a, b) = exp(-|a - b|^2 / (2 sigma^2))
inline double rbf_kernel(std::span<const double> a, std::span<const double> b, double sigma) {
    return std::exp(-squared_distance(a, b) / (2.0 * sigma * sigma));
}

/// Median Euclidean distance over all distinct training pairs.
inline double median_pairwise_distance(const Matrix& x) {
    std::vector<double> d;
    d.reserve(x.rows * (x.rows - 1) / 2);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = i + 1; j < x.rows; ++j) {
            d.push_back(std::sqrt(squared_distance(x.row(i), x.row(j))));
        }
    }
    if (d.empty()) {
        return 1.0;
    }
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    double median = *mid;
    if (d.size() % 2 == 0) {
        median = 0.5 * (median + *std::max_element(d.begin(), mid));
    }
    return median > 0.0 ? median : 1.0;
}

struct SvmDualSolution {
    std::vector<double> alpha;
    double bias = 0.0;
    double objective = 0.0;  // L_D at alpha
    double max_violation = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Maximizes L_D = sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
/// subject to 0 <= alpha_i <= c_box and sum(alpha_i y_i) = 0.
///
/// Working pairs are chosen by maximal violation with second-order
/// selection of the partner. Iteration stops once the KKT gap
/// m(alpha) - M(alpha) drops below `tolerance`.
inline SvmDualSolution solve_svm_dual(const Matrix& x, std::span<const double> y, double sigma, double c_box,
                                      double tolerance = kSvmTolerance, std::size_t max_iterations = 0) {
    const std::size_t n = x.rows;
    require(y.size() == n, "dimension_mismatch", "svm: label count mismatch");
    require(sigma > 0.0, "invalid_argument", "svm: sigma must be positive");
    require(c_box > 0.0, "invalid_argument", "svm: box constraint must be positive");
    bool has_pos = false;
    bool has_neg = false;
    for (double v : y) {
        require(v == 1.0 || v == -1.0, "invalid_argument", "svm: labels must be +1 or -1");
        has_pos |= v > 0.0;
        has_neg |= v < 0.0;
    }
    require(has_pos && has_neg, "invalid_argument", "svm: both classes must be present");
    if (max_iterations == 0) {
        max_iterations = std::max<std::size_t>(1000000, 100 * n);
    }

    Matrix kernel(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        kernel(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            kernel(i, j) = kernel(j, i) = rbf_kernel(x.row(i), x.row(j), sigma);
        }
    }

    constexpr double kTau = 1e-12;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of 1/2 a^T Q a - e^T a
    const auto upper = [&](std::size_t t) { return alpha[t] >= c_box; };
    const auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

    SvmDualSolution sol;
    while (true) {
        double gmax = -inf;
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0.0) {
                if (!upper(t) && -grad[t] >= gmax) {
                    gmax = -grad[t];
                    i = t;
                }
            } else if (!lower(t) && grad[t] >= gmax) {
                gmax = grad[t];
                i = t;
            }
        }

        double gmax2 = -inf;
        std::size_t j = n;
        double best = inf;
        for (std::size_t t = 0; t < n; ++t) {
            double grad_diff = 0.0;
            if (y[t] > 0.0) {
                if (lower(t)) {
                    continue;
                }
                gmax2 = std::max(gmax2, grad[t]);
                grad_diff = gmax + grad[t];
            } else {
                if (upper(t)) {
                    continue;
                }
                gmax2 = std::max(gmax2, -grad[t]);
                grad_diff = gmax - grad[t];
            }
            if (i < n && grad_diff > 0.0) {
                double quad = kernel(i, i) + kernel(t, t) - 2.0 * kernel(i, t);
                if (quad <= 0.0) {
                    quad = kTau;
                }
                const double obj = -(grad_diff * grad_diff) / quad;
                if (obj <= best) {
                    best = obj;
                    j = t;
                }
            }
        }

        sol.max_violation = std::max(0.0, gmax + gmax2);
        if (i == n || j == n || gmax + gmax2 < tolerance) {
            sol.converged = true;
            break;
        }
        if (sol.iterations >= max_iterations) {
            break;
        }
        ++sol.iterations;

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        const double qij = y[i] * y[j] * kernel(i, j);
        if (y[i] != y[j]) {
            double quad = kernel(i, i) + kernel(j, j) + 2.0 * qij;
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c_box) {
                    alpha[i] = c_box;
                    alpha[j] = c_box - diff;
                }
            } else if (alpha[j] > c_box) {
                alpha[j] = c_box;
                alpha[i] = c_box + diff;
            }
        } else {
            double quad = kernel(i, i) + kernel(j, j) - 2.0 * qij;
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c_box) {
                if (alpha[i] > c_box) {
                    alpha[i] = c_box;
                    alpha[j] = sum - c_box;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c_box) {
                if (alpha[j] > c_box) {
                    alpha[j] = c_box;
                    alpha[i] = sum - c_box;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += y[t] * (y[i] * kernel(t, i) * di + y[j] * kernel(t, j) * dj);
        }
    }

    // Bias from the KKT conditions: averaged over free vectors, otherwise the
    // midpoint of the feasible interval.
    double ub = inf;
    double lb = -inf;
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (upper(t)) {
            if (y[t] < 0.0) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else if (lower(t)) {
            if (y[t] > 0.0) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else {
            free_sum += yg;
            ++free_count;
        }
    }
    const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);
    sol.bias = -rho;

    double linear = 0.0;
    double quadratic = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        linear += alpha[t];
        // grad = Q alpha - e, so alpha^T Q alpha = alpha^T (grad + e)
        quadratic += alpha[t] * (grad[t] + 1.0);
    }
    sol.objective = linear - 0.5 * quadratic;
    sol.alpha = std::move(alpha);
    return sol;
}

struct SvmBinaryModel {
    Matrix support_vectors;
    std::vector<double> coefficients;  // alpha_i * y_i
    double bias = 0.0;
    double sigma = 1.0;
    double c_box = kDefaultBoxConstraint;
    Label target = 0;
    bool converged = false;
    std::size_t iterations = 0;
    double max_violation = 0.0;
};

inline SvmBinaryModel fit_svm_binary(const Matrix& x, std::span<const double> y, double sigma, double c_box,
                                     Label target = 0) {
    const auto sol = solve_svm_dual(x, y, sigma, c_box);
    SvmBinaryModel model;
    model.sigma = sigma;
    model.c_box = c_box;
    model.target = target;
    model.bias = sol.bias;
    model.converged = sol.converged;
    model.iterations = sol.iterations;
    model.max_violation = sol.max_violation;
    model.support_vectors = Matrix(0, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        if (sol.alpha[i] > kSvmAlphaEpsilon) {
            model.support_vectors.push_row(x.row(i));
            model.coefficients.push_back(sol.alpha[i] * y[i]);
        }
    }
    return model;
}

/// f(x) = sum_i alpha_i y_i K(x_i, x) + b
inline double svm_decision(const SvmBinaryModel& model, std::span<const double> x) {
    require(x.size() == model.support_vectors.cols, "dimension_mismatch", "svm: input dimension mismatch");
    double f = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.rows; ++i) {
        f += model.coefficients[i] * rbf_kernel(model.support_vectors.row(i), x, model.sigma);
    }
    return f;
}

struct SvmOvaModel {
    std::size_t dim = 0;
    double sigma = 1.0;
    std::vector<SvmBinaryModel> models;  // one per class
};

/// One binary machine per class (that class +1, the rest -1). A
/// non-positive sigma selects the median pairwise training distance.
inline SvmOvaModel fit_svm_ova(const LabeledSet& train, double sigma = 0.0, double c_box = kDefaultBoxConstraint) {
    train.validate();
    SvmOvaModel model;
    model.dim = train.dim();
    model.sigma = sigma > 0.0 ? sigma : median_pairwise_distance(train.x);
    std::vector<double> y(train.size());
    for (std::size_t c = 0; c < train.class_count; ++c) {
        for (std::size_t r = 0; r < train.size(); ++r) {
            y[r] = static_cast<std::size_t>(train.y[r]) == c ? 1.0 : -1.0;
        }
        model.models.push_back(fit_svm_binary(train.x, y, model.sigma, c_box, static_cast<Label>(c)));
    }
    return model;
}

inline std::vector<double> svm_scores(const SvmOvaModel& model, std::span<const double> x) {
    std::vector<double> scores;
    scores.reserve(model.models.size());
    for (const auto& m : model.models) {
        scores.push_back(svm_decision(m, x));
    }
    return scores;
}

inline Label predict_svm(const SvmOvaModel& model, std::span<const double> x) {
    return static_cast<Label>(argmax(svm_scores(model, x)));
}

}  // namespace har
