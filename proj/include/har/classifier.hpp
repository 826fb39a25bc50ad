#pragma once

// Uniform fit/predict/score interface over the four classifiers.

#include <har/knn.hpp>
#include <har/mlp.hpp>
#include <har/qda.hpp>
#include <har/svm.hpp>

#include <string>
#include <string_view>
#include <variant>

namespace har {

enum class ClassifierKind { qda, knn, svm, mlp };

inline constexpr std::array<ClassifierKind, 4> kAllClassifiers = {ClassifierKind::qda, ClassifierKind::knn,
                                                                  ClassifierKind::svm, ClassifierKind::mlp};

inline std::string_view to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::qda: return "qda";
        case ClassifierKind::knn: return "knn";
        case ClassifierKind::svm: return "svm";
        case ClassifierKind::mlp: return "mlp";
    }
    return "unknown";
}

inline ClassifierKind parse_classifier_kind(std::string_view name) {
    for (auto kind : kAllClassifiers) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw Error("invalid_argument", "unknown classifier '" + std::string(name) + "'");
}

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::svm;
    std::size_t k = 5;
    double sigma = 0.0;  // <= 0 selects the median heuristic
    double c_box = kDefaultBoxConstraint;
    MlpParams mlp;
};

inline ClassifierSpec make_spec(ClassifierKind kind) {
    ClassifierSpec spec;
    spec.kind = kind;
    return spec;
}

using Model = std::variant<QdaModel, KnnModel, SvmOvaModel, MlpModel>;

inline Model fit(const ClassifierSpec& spec, const LabeledSet& train) {
    switch (spec.kind) {
        case ClassifierKind::qda: return fit_qda(train);
        case ClassifierKind::knn: return fit_knn(train, spec.k);
        case ClassifierKind::svm: return fit_svm_ova(train, spec.sigma, spec.c_box);
        case ClassifierKind::mlp: return fit_mlp(train, spec.mlp);
    }
    throw Error("invalid_argument", "unknown classifier kind");
}

inline ClassifierKind kind_of(const Model& model) {
    return static_cast<ClassifierKind>(model.index());
}

inline Label predict(const Model& model, std::span<const double> x) {
    return std::visit(
        [&](const auto& m) -> Label {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, QdaModel>) {
                return predict_qda(m, x);
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                return knn_predict(m, x);
            } else if constexpr (std::is_same_v<T, SvmOvaModel>) {
                return predict_svm(m, x);
            } else {
                return predict_mlp(m, x);
            }
        },
        model);
}

/// Per-class scores: QDA discriminants, kNN vote fractions, SVM decision
/// values, MLP posteriors.
inline std::vector<double> scores(const Model& model, std::span<const double> x) {
    return std::visit(
        [&](const auto& m) -> std::vector<double> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, QdaModel>) {
                return qda_discriminants(m, x);
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                return knn_vote_fractions(m, x);
            } else if constexpr (std::is_same_v<T, SvmOvaModel>) {
                return svm_scores(m, x);
            } else {
                return mlp_posteriors(m, x);
            }
        },
        model);
}

inline std::size_t input_dim(const Model& model) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, QdaModel>) {
                return m.dim;
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                return m.train.cols;
            } else if constexpr (std::is_same_v<T, SvmOvaModel>) {
                return m.dim;
            } else {
                return m.inputs;
            }
        },
        model);
}

}  // namespace har
