#pragma once

// k-nearest-neighbour classifier in standardized feature space.

#include <har/features.hpp>
#include <har/labeled_set.hpp>

#include <algorithm>
#include <numeric>
#include <vector>

namespace har {

struct KnnModel {
    Standardizer standardizer;
    Matrix train;  // standardized
    std::vector<Label> labels;
    std::size_t k = 5;
    std::size_t class_count = 0;
};

/// Stores the standardized training set. k is clamped to the training size.
inline KnnModel fit_knn(const LabeledSet& data, std::size_t k = 5) {
    data.validate();
    require(k >= 1, "invalid_argument", "knn: k must be at least 1");
    KnnModel model;
    model.standardizer = fit_standardizer(data.x);
    model.train = model.standardizer.apply(data.x);
    model.labels = data.y;
    model.k = std::min(k, data.size());
    model.class_count = data.class_count;
    return model;
}

/// Indices of the k nearest training rows, nearest first. Equal distances
/// keep the smaller training index first.
inline std::vector<std::size_t> knn_neighbors(const KnnModel& model, std::span<const double> x) {
    require(x.size() == model.train.cols, "dimension_mismatch", "knn: input dimension mismatch");
    const auto z = model.standardizer.apply(x);
    const std::size_t n = model.train.rows;
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        dist[i] = squared_distance(model.train.row(i), z);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto by_distance = [&](std::size_t a, std::size_t b) {
        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(model.k), order.end(), by_distance);
    order.resize(model.k);
    return order;
}

/// Fraction of the k neighbours voting for each class.
inline std::vector<double> knn_vote_fractions(const KnnModel& model, std::span<const double> x) {
    std::vector<double> votes(model.class_count, 0.0);
    for (std::size_t i : knn_neighbors(model, x)) {
        votes[static_cast<std::size_t>(model.labels[i])] += 1.0;
    }
    for (double& v : votes) {
        v /= static_cast<double>(model.k);
    }
    return votes;
}

/// Majority vote. A tie between classes goes to the tied class whose
/// member is nearest.
inline Label knn_predict(const KnnModel& model, std::span<const double> x) {
    const auto neighbors = knn_neighbors(model, x);
    std::vector<std::size_t> votes(model.class_count, 0);
    for (std::size_t i : neighbors) {
        ++votes[static_cast<std::size_t>(model.labels[i])];
    }
    const std::size_t top = *std::max_element(votes.begin(), votes.end());
    for (std::size_t i : neighbors) {
        const Label l = model.labels[i];
        if (votes[static_cast<std::size_t>(l)] == top) {
            return l;
        }
    }
    return model.labels[neighbors.front()];
}

}  // namespace har
