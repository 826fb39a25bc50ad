#pragma once

// Dimensionality reduction: Fisher linear discriminant projection and
// wrapper-based sequential forward selection.

#include <har/classifier.hpp>
#include <har/labeled_set.hpp>
#include <har/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

namespace har {

struct LdaProjection {
    std::vector<double> mean;  // global mean, d
    Matrix matrix;             // d x m, unit-norm columns
    std::vector<double> eigenvalues;

    std::size_t input_dim() const { return matrix.rows; }
    std::size_t output_dim() const { return matrix.cols; }
};

struct LdaScatter {
    Matrix between;
    Matrix within;  // ridge-regularized
    Matrix within_cholesky;
    std::vector<double> mean;
};

/// Between-class scatter S_b = sum_c n_c (mu_c - mu)(mu_c - mu)^T and the
/// regularized within-class scatter S_w.
inline LdaScatter lda_scatter(const LabeledSet& data) {
    data.validate();
    const std::size_t d = data.dim();
    const auto counts = data.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        require(counts[c] >= 2, "invalid_argument", "lda: class " + std::to_string(c) + " has fewer than 2 samples");
    }

    std::vector<double> mean(d, 0.0);
    Matrix class_means(data.class_count, d);
    for (std::size_t r = 0; r < data.size(); ++r) {
        const auto c = static_cast<std::size_t>(data.y[r]);
        for (std::size_t j = 0; j < d; ++j) {
            mean[j] += data.x(r, j);
            class_means(c, j) += data.x(r, j);
        }
    }
    for (double& v : mean) {
        v /= static_cast<double>(data.size());
    }
    for (std::size_t c = 0; c < data.class_count; ++c) {
        for (std::size_t j = 0; j < d; ++j) {
            class_means(c, j) /= static_cast<double>(counts[c]);
        }
    }

    Matrix within(d, d);
    std::vector<double> diff(d);
    for (std::size_t r = 0; r < data.size(); ++r) {
        const auto c = static_cast<std::size_t>(data.y[r]);
        for (std::size_t j = 0; j < d; ++j) {
            diff[j] = data.x(r, j) - class_means(c, j);
        }
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = 0; b < d; ++b) {
                within(a, b) += diff[a] * diff[b];
            }
        }
    }
    Matrix between(d, d);
    for (std::size_t c = 0; c < data.class_count; ++c) {
        for (std::size_t j = 0; j < d; ++j) {
            diff[j] = class_means(c, j) - mean[j];
        }
        const auto n = static_cast<double>(counts[c]);
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = 0; b < d; ++b) {
                between(a, b) += n * diff[a] * diff[b];
            }
        }
    }

    auto reg = linalg::regularize_spd(within);
    return {std::move(between), std::move(reg.matrix), std::move(reg.cholesky), std::move(mean)};
}

/// Solves S_b v = lambda S_w v through the Cholesky factor of S_w and a
/// Jacobi eigen-decomposition of L^-1 S_b L^-T. Returns the leading
/// min(m, C-1) directions, each scaled to unit length with its largest
/// component positive.
inline LdaProjection fit_lda(const LabeledSet& data, std::size_t components) {
    require(components >= 1 && components <= data.dim(), "invalid_argument",
            "lda: requested components must lie in [1, d]");
    const LdaScatter s = lda_scatter(data);
    const std::size_t d = data.dim();
    const std::size_t m = std::min(components, data.class_count - 1);
    require(m >= 1, "invalid_argument", "lda: at least two classes are required");

    // Y = L^-1 S_b, then M = L^-1 Y^T = L^-1 S_b L^-T.
    Matrix y(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> col(d);
        for (std::size_t i = 0; i < d; ++i) {
            col[i] = s.between(i, j);
        }
        const auto solved = linalg::forward_solve(s.within_cholesky, col);
        for (std::size_t i = 0; i < d; ++i) {
            y(i, j) = solved[i];
        }
    }
    Matrix reduced(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> col(d);
        for (std::size_t i = 0; i < d; ++i) {
            col[i] = y(j, i);
        }
        const auto solved = linalg::forward_solve(s.within_cholesky, col);
        for (std::size_t i = 0; i < d; ++i) {
            reduced(i, j) = solved[i];
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const double avg = 0.5 * (reduced(i, j) + reduced(j, i));
            reduced(i, j) = reduced(j, i) = avg;
        }
    }

    const auto eig = linalg::jacobi_eigen(reduced);
    LdaProjection proj;
    proj.mean = s.mean;
    proj.matrix = Matrix(d, m);
    for (std::size_t c = 0; c < m; ++c) {
        std::vector<double> u(d);
        for (std::size_t i = 0; i < d; ++i) {
            u[i] = eig.vectors(i, c);
        }
        auto v = linalg::backward_solve_transposed(s.within_cholesky, u);
        const double len = linalg::norm(v);
        std::size_t largest = 0;
        for (std::size_t i = 1; i < d; ++i) {
            if (std::abs(v[i]) > std::abs(v[largest])) {
                largest = i;
            }
        }
        const double sign = v[largest] < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            proj.matrix(i, c) = sign * v[i] / len;
        }
        proj.eigenvalues.push_back(std::max(0.0, eig.values[c]));
    }
    return proj;
}

inline std::vector<double> project(const LdaProjection& proj, std::span<const double> x) {
    require(x.size() == proj.input_dim(), "dimension_mismatch", "lda: input dimension mismatch");
    std::vector<double> out(proj.output_dim(), 0.0);
    for (std::size_t i = 0; i < proj.input_dim(); ++i) {
        const double centered = x[i] - proj.mean[i];
        for (std::size_t c = 0; c < proj.output_dim(); ++c) {
            out[c] += centered * proj.matrix(i, c);
        }
    }
    return out;
}

inline Matrix project(const LdaProjection& proj, const Matrix& x) {
    Matrix out(x.rows, proj.output_dim());
    for (std::size_t r = 0; r < x.rows; ++r) {
        const auto p = project(proj, x.row(r));
        std::copy(p.begin(), p.end(), out.row(r).begin());
    }
    return out;
}

struct FeatureSubset {
    std::vector<std::size_t> indices;
    std::vector<double> scores;  // cross-validated rate after each addition
};

/// Fold id per row. Rows of each class are shuffled and dealt round-robin.
inline std::vector<std::size_t> stratified_folds(std::span<const Label> labels, std::size_t class_count,
                                                 std::size_t folds, std::uint64_t seed) {
    require(folds >= 2, "invalid_argument", "cross-validation needs at least 2 folds");
    Rng rng(seed);
    std::vector<std::size_t> fold_of(labels.size(), 0);
    for (std::size_t c = 0; c < class_count; ++c) {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < labels.size(); ++r) {
            if (static_cast<std::size_t>(labels[r]) == c) {
                rows.push_back(r);
            }
        }
        shuffle(rows, rng);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            fold_of[rows[i]] = i % folds;
        }
    }
    return fold_of;
}

/// Mean per-fold classification rate of `spec` restricted to `features`.
/// A fold whose fit throws scores 0; folds without test rows are skipped.
inline double cross_validate(const LabeledSet& data, std::span<const std::size_t> features,
                             const ClassifierSpec& spec, std::span<const std::size_t> fold_of, std::size_t folds) {
    const LabeledSet reduced = data.columns(features);
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_rows;
        std::vector<std::size_t> test_rows;
        for (std::size_t r = 0; r < data.size(); ++r) {
            (fold_of[r] == f ? test_rows : train_rows).push_back(r);
        }
        if (test_rows.empty()) {
            continue;
        }
        ++used;
        try {
            const Model model = fit(spec, reduced.subset(train_rows));
            std::size_t correct = 0;
            for (std::size_t r : test_rows) {
                correct += predict(model, reduced.x.row(r)) == reduced.y[r] ? 1 : 0;
            }
            total += static_cast<double>(correct) / static_cast<double>(test_rows.size());
        } catch (const Error&) {
            // counts as 0 for this fold
        }
    }
    return used > 0 ? total / static_cast<double>(used) : 0.0;
}

/// Greedy forward selection: each step adds the feature with the highest
/// cross-validated rate together with those already chosen (lowest index
/// on ties). Folds are drawn once from `seed` and reused at every step.
inline FeatureSubset sfs_select(const LabeledSet& data, const ClassifierSpec& spec, std::size_t target_size = 5,
                                std::size_t folds = 5, std::uint64_t seed = 0) {
    data.validate();
    require(target_size >= 1 && target_size <= data.dim(), "invalid_argument",
            "sfs: target_size must lie in [1, d]");
    const auto fold_of = stratified_folds(data.y, data.class_count, folds, seed);

    FeatureSubset subset;
    std::vector<bool> taken(data.dim(), false);
    while (subset.indices.size() < target_size) {
        double best_score = -1.0;
        std::size_t best = data.dim();
        std::vector<std::size_t> candidate = subset.indices;
        candidate.push_back(0);
        for (std::size_t f = 0; f < data.dim(); ++f) {
            if (taken[f]) {
                continue;
            }
            candidate.back() = f;
            const double score = cross_validate(data, candidate, spec, fold_of, folds);
            if (score > best_score) {
                best_score = score;
                best = f;
            }
        }
        taken[best] = true;
        subset.indices.push_back(best);
        subset.scores.push_back(best_score);
    }
    return subset;
}

/// Ranks features across several per-classifier subsets: most frequently
/// selected first, then by mean selection position, then by index.
inline std::vector<std::size_t> consensus_subset(std::span<const FeatureSubset> subsets, std::size_t size) {
    struct Tally {
        std::size_t count = 0;
        double position_sum = 0.0;
    };
    std::map<std::size_t, Tally> tallies;
    for (const auto& s : subsets) {
        for (std::size_t pos = 0; pos < s.indices.size(); ++pos) {
            auto& t = tallies[s.indices[pos]];
            ++t.count;
            t.position_sum += static_cast<double>(pos);
        }
    }
    std::vector<std::pair<std::size_t, Tally>> ranked(tallies.begin(), tallies.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.count != b.second.count) {
            return a.second.count > b.second.count;
        }
        const double pa = a.second.position_sum / static_cast<double>(a.second.count);
        const double pb = b.second.position_sum / static_cast<double>(b.second.count);
        return pa < pb;
    });
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min(size, ranked.size()); ++i) {
        out.push_back(ranked[i].first);
    }
    return out;
}

}  // namespace har
