#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "imbalforest/dataset.hpp"
#include "imbalforest/random.hpp"

namespace imbalforest {

struct SmoteConfig {
    std::size_t k = 5;         // neighbors considered per minority row
    double target_ratio = 1.0; // desired minority/majority ratio, in (0, 1]

    void validate() const;
};

struct ResampleReport {
    std::size_t original_majority = 0;
    std::size_t original_minority = 0;
    std::size_t final_majority = 0;
    std::size_t final_minority = 0;
    std::size_t synthetic_rows_added = 0;
    int minority_label = 1;
};

// The k rows (excluding query_index) of the row-major points matrix with the
// smallest Euclidean distance to the query row; ties broken by lower row
// index; result sorted by (distance, index). Throws if k >= n_rows.
std::vector<std::size_t> knn_indices(std::span<const double> points,
                                     std::size_t n_features,
                                     std::size_t query_index, std::size_t k);

// SMOTE: appends ceil(target_ratio * majority) - minority synthetic minority
// rows after all original rows. Base rows are visited round-robin in index
// order; for each, one of its k nearest minority neighbors is picked
// uniformly and the synthetic row is base + u * (neighbor - base) with u
// uniform in [0, 1). Deterministic given rng. No-op (with report) if the
// class ratio already meets target_ratio.
std::pair<Dataset, ResampleReport> smote(const Dataset& ds,
                                         const SmoteConfig& cfg,
                                         const RandomSource& rng);

} // namespace imbalforest
