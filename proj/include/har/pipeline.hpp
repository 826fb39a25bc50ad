#pragma once

// Feature-space transforms fitted on training data (standardization plus an
// optional LDA projection or feature subset) and the model bundle that
// applies one before classifying.

#include <har/classifier.hpp>
#include <har/features.hpp>
#include <har/reduction.hpp>

#include <optional>
#include <string_view>

namespace har {

enum class FeatureSpace { original, lda, sfs };

inline constexpr std::array<FeatureSpace, 3> kAllSpaces = {FeatureSpace::original, FeatureSpace::lda,
                                                           FeatureSpace::sfs};

inline std::string_view to_string(FeatureSpace space) {
    switch (space) {
        case FeatureSpace::original: return "original";
        case FeatureSpace::lda: return "lda";
        case FeatureSpace::sfs: return "sfs";
    }
    return "unknown";
}

inline FeatureSpace parse_feature_space(std::string_view name) {
    for (auto s : kAllSpaces) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw Error("invalid_argument", "unknown feature space '" + std::string(name) + "'");
}

struct SpaceConfig {
    FeatureSpace space = FeatureSpace::original;
    std::size_t lda_components = kClassCount - 1;
    std::vector<std::size_t> sfs_indices;  // empty: run SFS on the training data
    std::size_t sfs_target = 5;
    std::size_t sfs_folds = 5;
    std::uint64_t sfs_seed = 0;
};

struct FeatureTransform {
    FeatureSpace space = FeatureSpace::original;
    Standardizer standardizer;
    std::optional<LdaProjection> lda;
    std::optional<FeatureSubset> subset;

    std::size_t input_dim() const { return standardizer.mean.size(); }

    std::size_t output_dim() const {
        if (lda) {
            return lda->output_dim();
        }
        if (subset) {
            return subset->indices.size();
        }
        return input_dim();
    }

    std::vector<double> apply(std::span<const double> x) const {
        auto z = standardizer.apply(x);
        if (lda) {
            return project(*lda, z);
        }
        if (subset) {
            std::vector<double> out;
            out.reserve(subset->indices.size());
            for (std::size_t i : subset->indices) {
                out.push_back(z[i]);
            }
            return out;
        }
        return z;
    }

    Matrix apply(const Matrix& m) const {
        Matrix out(m.rows, output_dim());
        for (std::size_t r = 0; r < m.rows; ++r) {
            const auto v = apply(m.row(r));
            std::copy(v.begin(), v.end(), out.row(r).begin());
        }
        return out;
    }

    LabeledSet apply(const LabeledSet& s) const { return {apply(s.x), s.y, s.class_count}; }
};

/// Fits the transform on `train` only. SFS wraps `wrapped` when no subset
/// is supplied in the config.
inline FeatureTransform fit_transform(const LabeledSet& train, const SpaceConfig& config,
                                      const ClassifierSpec& wrapped) {
    FeatureTransform t;
    t.space = config.space;
    t.standardizer = fit_standardizer(train.x);
    if (config.space == FeatureSpace::original) {
        return t;
    }
    const LabeledSet z{t.standardizer.apply(train.x), train.y, train.class_count};
    if (config.space == FeatureSpace::lda) {
        t.lda = fit_lda(z, std::min(config.lda_components, z.dim()));
    } else if (!config.sfs_indices.empty()) {
        FeatureSubset s;
        s.indices = config.sfs_indices;
        for (std::size_t i : s.indices) {
            require(i < z.dim(), "invalid_argument", "sfs index out of range");
        }
        t.subset = std::move(s);
    } else {
        t.subset = sfs_select(z, wrapped, config.sfs_target, config.sfs_folds, config.sfs_seed);
    }
    return t;
}

/// A transform and the classifier trained in its output space.
struct Pipeline {
    FeatureTransform transform;
    Model model;

    Label predict(std::span<const double> x) const { return har::predict(model, transform.apply(x)); }
};

}  // namespace har
