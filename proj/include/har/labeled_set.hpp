#pragma once

#include <har/core.hpp>

#include <string>
#include <vector>

namespace har {

/// Training data for the classifiers: n rows of d features and a class id
/// per row in 0..class_count-1.
struct LabeledSet {
    Matrix x;
    std::vector<Label> y;
    std::size_t class_count = 0;

    std::size_t size() const { return x.rows; }
    std::size_t dim() const { return x.cols; }

    void validate() const {
        require(x.rows >= 1, "invalid_argument", "labeled set is empty");
        require(x.rows == y.size(), "dimension_mismatch", "labeled set: row count does not match label count");
        require(class_count >= 1, "invalid_argument", "labeled set: class_count must be positive");
        for (Label l : y) {
            require(l >= 0 && static_cast<std::size_t>(l) < class_count, "invalid_argument",
                    "labeled set: label " + std::to_string(l) + " out of range");
        }
        require(all_finite(x.data), "invalid_argument", "labeled set contains non-finite values");
    }

    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(class_count, 0);
        for (Label l : y) {
            ++counts[static_cast<std::size_t>(l)];
        }
        return counts;
    }

    LabeledSet subset(std::span<const std::size_t> rows) const {
        LabeledSet out;
        out.x = select_rows(x, rows);
        out.y.reserve(rows.size());
        for (std::size_t r : rows) {
            out.y.push_back(y[r]);
        }
        out.class_count = class_count;
        return out;
    }

    LabeledSet columns(std::span<const std::size_t> cols) const {
        return {select_columns(x, cols), y, class_count};
    }
};

}  // namespace har
