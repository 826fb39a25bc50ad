#pragma once

// Gaussian quadratic discriminant classifier.

#include <har/labeled_set.hpp>
#include <har/linalg.hpp>

#include <cmath>
#include <vector>

namespace har {

struct QdaClass {
    std::vector<double> mean;
    Matrix covariance;  // regularized
    Matrix cholesky;
    double log_det = 0.0;
    double prior = 0.0;
    double lambda = 0.0;
};

struct QdaModel {
    std::size_t dim = 0;
    std::vector<QdaClass> classes;
};

/// Rebuilds the cached factorization after the covariance is set.
inline void finalize_qda_class(QdaClass& c) {
    auto l = linalg::cholesky(c.covariance);
    require(l.has_value(), "numerical", "qda: covariance is not positive definite");
    c.cholesky = std::move(*l);
    c.log_det = linalg::log_determinant_from_cholesky(c.cholesky);
}

/// Per-class maximum-likelihood mean and covariance, ridge-regularized, with
/// class-frequency priors.
inline QdaModel fit_qda(const LabeledSet& train) {
    train.validate();
    const std::size_t d = train.dim();
    const auto counts = train.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        require(counts[c] >= 2, "invalid_argument",
                "qda: class " + std::to_string(c) + " has fewer than 2 samples");
    }

    QdaModel model;
    model.dim = d;
    model.classes.resize(train.class_count);
    for (std::size_t c = 0; c < train.class_count; ++c) {
        QdaClass& cls = model.classes[c];
        cls.mean.assign(d, 0.0);
        for (std::size_t r = 0; r < train.size(); ++r) {
            if (static_cast<std::size_t>(train.y[r]) != c) {
                continue;
            }
            for (std::size_t j = 0; j < d; ++j) {
                cls.mean[j] += train.x(r, j);
            }
        }
        const auto n = static_cast<double>(counts[c]);
        for (double& m : cls.mean) {
            m /= n;
        }

        Matrix cov(d, d);
        std::vector<double> diff(d);
        for (std::size_t r = 0; r < train.size(); ++r) {
            if (static_cast<std::size_t>(train.y[r]) != c) {
                continue;
            }
            for (std::size_t j = 0; j < d; ++j) {
                diff[j] = train.x(r, j) - cls.mean[j];
            }
            for (std::size_t a = 0; a < d; ++a) {
                for (std::size_t b = a; b < d; ++b) {
                    cov(a, b) += diff[a] * diff[b];
                }
            }
        }
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = a; b < d; ++b) {
                cov(a, b) /= n;
                cov(b, a) = cov(a, b);
            }
        }

        auto reg = linalg::regularize_spd(cov);
        cls.covariance = std::move(reg.matrix);
        cls.cholesky = std::move(reg.cholesky);
        cls.lambda = reg.lambda;
        cls.log_det = linalg::log_determinant_from_cholesky(cls.cholesky);
        cls.prior = n / static_cast<double>(train.size());
    }
    return model;
}

/// g_i(x) = -1/2 (x-mu_i)^T Sigma_i^-1 (x-mu_i) - 1/2 log|Sigma_i| + log P(w_i)
inline std::vector<double> qda_discriminants(const QdaModel& model, std::span<const double> x) {
    require(x.size() == model.dim, "dimension_mismatch", "qda: input dimension mismatch");
    std::vector<double> g(model.classes.size());
    std::vector<double> diff(model.dim);
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        const auto& cls = model.classes[c];
        for (std::size_t j = 0; j < model.dim; ++j) {
            diff[j] = x[j] - cls.mean[j];
        }
        const auto z = linalg::forward_solve(cls.cholesky, diff);
        const double mahalanobis = linalg::dot(z, z);
        g[c] = -0.5 * mahalanobis - 0.5 * cls.log_det + std::log(cls.prior);
    }
    return g;
}

/// Index of the largest value; the first one wins ties.
inline std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

inline Label predict_qda(const QdaModel& model, std::span<const double> x) {
    return static_cast<Label>(argmax(qda_discriminants(model, x)));
}

}  // namespace har
