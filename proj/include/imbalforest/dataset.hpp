#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace imbalforest {

// Numeric feature matrix plus binary labels; the currency between pipeline
// stages. Row-major storage, labels[i] in {0, 1} (1 = fraud).
struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<double> features; // n_rows() x n_features(), row-major
    std::vector<int> labels;

    std::size_t n_rows() const { return labels.size(); }
    std::size_t n_features() const { return feature_names.size(); }

    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * n_features(), n_features()};
    }

    double at(std::size_t r, std::size_t c) const {
        return features[r * n_features() + c];
    }

    bool operator==(const Dataset&) const = default;
};

// Throws std::invalid_argument on shape mismatch, non-finite features, or
// labels outside {0, 1}.
void check_dataset(const Dataset& ds);

// (count of label 0, count of label 1)
std::pair<std::size_t, std::size_t> class_counts(const Dataset& ds);

// Index of the named feature; throws std::invalid_argument if unknown.
std::size_t feature_index(const Dataset& ds, const std::string& name);

} // namespace imbalforest
