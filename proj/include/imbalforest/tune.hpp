#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "imbalforest/dataset.hpp"
#include "imbalforest/forest.hpp"
#include "imbalforest/random.hpp"
#include "imbalforest/resample.hpp"

namespace imbalforest {

// Candidate values per hyperparameter; the search covers the Cartesian
// product, enumerated with n_trees outermost and max_features innermost.
struct ParamGrid {
    std::vector<std::size_t> n_trees{50, 100, 200};
    std::vector<std::optional<std::size_t>> max_depth{8, 16, std::nullopt};
    std::vector<std::size_t> min_samples_split{2, 10};
    std::vector<MaxFeatures> max_features{MaxFeatures::sqrt_total()};

    void validate() const;
    std::size_t combination_count() const;
    std::vector<ForestParams> combinations(bool bootstrap = true) const;
};

struct TuningCell {
    ForestParams params;
    double mean_f1 = 0.0;
    std::vector<double> fold_f1;
};

struct TuningResult {
    ForestParams best_params;
    double best_score = 0.0;
    std::vector<TuningCell> table; // full Cartesian product, in grid order
};

// k disjoint validation index sets partitioning [0, n_rows); per-class fold
// sizes differ by at most 1. Deterministic given rng.
std::vector<std::vector<std::size_t>> stratified_kfold(const Dataset& ds,
                                                       std::size_t k,
                                                       const RandomSource& rng);

// For every combination and fold: SMOTE the training folds only, fit,
// score class-1 F1 on the untouched validation fold (an undefined F1 counts
// as 0). Best = argmax mean F1; ties broken by fewer trees, then shallower
// max_depth, then grid order.
TuningResult grid_search(const Dataset& train, const ParamGrid& grid,
                         const SmoteConfig& smote_cfg, std::size_t k,
                         const RandomSource& rng, unsigned threads = 1);

} // namespace imbalforest
