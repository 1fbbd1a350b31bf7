#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "imbalforest/dataio.hpp"
#include "imbalforest/dataset.hpp"
#include "imbalforest/random.hpp"

namespace imbalforest {

// Symmetric Pearson correlation matrix with unit diagonal. Columns with zero
// variance are listed in zero_variance and get coefficient 0 off-diagonal.
struct CorrMatrix {
    std::vector<std::string> names;
    std::vector<double> values; // row-major square
    std::vector<std::string> zero_variance;

    double at(std::size_t i, std::size_t j) const {
        return values[i * names.size() + j];
    }
};

CorrMatrix pearson_corr(const Dataset& ds,
                        const std::vector<std::string>& feature_subset);

// Maps the label column ("LEGIT" -> 0, "FRAUD" -> 1, case-sensitive) and
// turns the remaining numeric columns into features, preserving order.
// Columns named in `drop` are removed first; any categorical-text column not
// dropped is an error.
Dataset encode_labels(const RawDataset& raw,
                      const std::vector<std::string>& drop = {});

// Removes the named feature columns, preserving the order of the rest.
Dataset drop_features(const Dataset& ds, const std::vector<std::string>& names);

// Collapses rows identical in every feature and the label (bitwise) to their
// first occurrence, keeping order. Returns (deduped, removed_count).
std::pair<Dataset, std::size_t> dedup(const Dataset& ds);

struct SplitResult {
    Dataset train;
    Dataset test;
    double test_fraction = 0.0;
    // Original row indices of each side, ascending; together they partition
    // [0, n_rows).
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

// Per class, the test side receives round-half-up(count * test_fraction)
// rows chosen uniformly without replacement. Deterministic given rng.
SplitResult stratified_split(const Dataset& ds, double test_fraction,
                             const RandomSource& rng);

} // namespace imbalforest
