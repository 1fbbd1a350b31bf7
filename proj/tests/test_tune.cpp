#include <doctest.h>

#include <cmath>
#include <set>

#include "imbalforest/dataio.hpp"
#include "imbalforest/tune.hpp"
#include "test_support.hpp"

using namespace imbalforest;
using test_support::make_dataset;

TEST_SUITE_BEGIN("tune");

TEST_CASE("stratified_kfold deals one of each class per fold") {
    auto stream = RandomSource(301, "kfold").stream();
    Dataset ds = test_support::random_dataset(stream, 10, 2);
    for (std::size_t r = 0; r < 10; ++r) ds.labels[r] = int(r % 2);
    const auto folds = stratified_kfold(ds, 5, RandomSource(1));
    REQUIRE(folds.size() == 5);
    for (const auto& fold : folds) {
        REQUIRE(fold.size() == 2);
        CHECK(ds.labels[fold[0]] + ds.labels[fold[1]] == 1);
    }
}

TEST_CASE("stratified_kfold partitions all indices") {
    auto stream = RandomSource(302, "kfold").stream();
    const Dataset ds = test_support::random_dataset(stream, 53, 3);
    const auto folds = stratified_kfold(ds, 4, RandomSource(2));
    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto& fold : folds) {
        total += fold.size();
        seen.insert(fold.begin(), fold.end());
    }
    CHECK(total == 53);
    CHECK(seen.size() == 53);

    // Per-class fold sizes differ by at most one.
    for (int cls : {0, 1}) {
        std::size_t lo = 53, hi = 0;
        for (const auto& fold : folds) {
            std::size_t count = 0;
            for (std::size_t r : fold) count += std::size_t(ds.labels[r] == cls);
            lo = std::min(lo, count);
            hi = std::max(hi, count);
        }
        CHECK(hi - lo <= 1);
    }
}

TEST_CASE("stratified_kfold is deterministic and validates inputs") {
    auto stream = RandomSource(303, "kfold").stream();
    const Dataset ds = test_support::random_dataset(stream, 30, 2);
    CHECK(stratified_kfold(ds, 3, RandomSource(5)) ==
          stratified_kfold(ds, 3, RandomSource(5)));
    CHECK_THROWS_AS(stratified_kfold(ds, 1, RandomSource(5)),
                    std::invalid_argument);
    const Dataset skewed =
        make_dataset({"x"}, {{1}, {2}, {3}, {4}, {5}}, {0, 0, 0, 0, 1});
    CHECK_THROWS_WITH_AS(stratified_kfold(skewed, 2, RandomSource(5)),
                         doctest::Contains("fewer than k"),
                         std::invalid_argument);
}

TEST_CASE("validation folds contain only original rows") {
    // Mirrors the fold construction used by grid_search: held-out rows are
    // taken straight from the training set; only the complement is
    // resampled. Mark every original row with a unique key and check each
    // fold's rows appear verbatim.
    SynthSpec spec{80, 0.25, 3, 1.0, false};
    Dataset ds = generate_synthetic(spec, RandomSource(304));
    for (std::size_t r = 0; r < ds.n_rows(); ++r)
        ds.features[r * ds.n_features()] = double(r) + 0.25;
    const auto folds = stratified_kfold(ds, 4, RandomSource(6));
    for (const auto& fold : folds)
        for (std::size_t r : fold)
            CHECK(ds.at(r, 0) == double(r) + 0.25);
}

TEST_CASE("single-combination grid reduces to that combination") {
    SynthSpec spec{120, 0.2, 3, 2.0, false};
    const Dataset ds = generate_synthetic(spec, RandomSource(305));
    ParamGrid grid;
    grid.n_trees = {10};
    grid.max_depth = {std::optional<std::size_t>(4)};
    grid.min_samples_split = {2};
    grid.max_features = {MaxFeatures::sqrt_total()};
    const TuningResult result =
        grid_search(ds, grid, SmoteConfig{3, 1.0}, 3, RandomSource(7), 1);
    REQUIRE(result.table.size() == 1);
    CHECK(result.best_params.n_trees == 10);
    CHECK(result.best_params.max_depth == std::size_t(4));
    CHECK(result.best_score == result.table[0].mean_f1);
    CHECK(result.table[0].fold_f1.size() == 3);
}

TEST_CASE("the table covers the whole Cartesian product in grid order") {
    ParamGrid grid;
    grid.n_trees = {5, 10};
    grid.max_depth = {std::optional<std::size_t>(2), std::nullopt};
    grid.min_samples_split = {2, 4};
    grid.max_features = {MaxFeatures::sqrt_total()};
    CHECK(grid.combination_count() == 8);

    SynthSpec spec{90, 0.2, 3, 1.5, false};
    const Dataset ds = generate_synthetic(spec, RandomSource(306));
    const TuningResult result =
        grid_search(ds, grid, SmoteConfig{3, 1.0}, 3, RandomSource(8), 1);
    REQUIRE(result.table.size() == 8);
    CHECK(result.table[0].params.n_trees == 5);
    CHECK(result.table[7].params.n_trees == 10);
    CHECK(result.table[0].params.max_depth == std::size_t(2));
    CHECK(!result.table[2].params.max_depth.has_value());

    double best = -1.0;
    for (const auto& cell : result.table) best = std::max(best, cell.mean_f1);
    CHECK(result.best_score == best);
}

TEST_CASE("deeper trees never lose to stumps on ring-shaped data") {
    // A radial boundary is not separable by one axis cut, so depth-1 stumps
    // must trail full-depth trees on mean F1.
    auto stream = RandomSource(307, "ring").stream();
    Dataset ds;
    ds.feature_names = {"x", "y"};
    for (int r = 0; r < 240; ++r) {
        const double x = stream.next_double() * 4.0 - 2.0;
        const double y = stream.next_double() * 4.0 - 2.0;
        ds.features.push_back(x);
        ds.features.push_back(y);
        ds.labels.push_back(x * x + y * y < 1.0 ? 1 : 0);
    }
    ParamGrid grid;
    grid.n_trees = {20};
    grid.max_depth = {std::optional<std::size_t>(1), std::nullopt};
    grid.min_samples_split = {2};
    grid.max_features = {MaxFeatures::all()};
    const TuningResult result =
        grid_search(ds, grid, SmoteConfig{5, 1.0}, 3, RandomSource(9), 1);
    REQUIRE(result.table.size() == 2);
    const double stump = result.table[0].mean_f1;
    const double deep = result.table[1].mean_f1;
    CHECK(deep >= stump);
    CHECK(!result.best_params.max_depth.has_value());
}

TEST_CASE("grid_search reproduces the identical table under one seed") {
    SynthSpec spec{100, 0.2, 3, 1.5, false};
    const Dataset ds = generate_synthetic(spec, RandomSource(308));
    ParamGrid grid;
    grid.n_trees = {5, 10};
    grid.max_depth = {std::optional<std::size_t>(3)};
    grid.min_samples_split = {2};
    grid.max_features = {MaxFeatures::sqrt_total()};
    const TuningResult a =
        grid_search(ds, grid, SmoteConfig{3, 1.0}, 3, RandomSource(10), 1);
    const TuningResult b =
        grid_search(ds, grid, SmoteConfig{3, 1.0}, 3, RandomSource(10), 4);
    REQUIRE(a.table.size() == b.table.size());
    for (std::size_t i = 0; i < a.table.size(); ++i) {
        CHECK(a.table[i].fold_f1 == b.table[i].fold_f1);
        CHECK(a.table[i].mean_f1 == b.table[i].mean_f1);
    }
    CHECK(a.best_params == b.best_params);
}

TEST_CASE("ties prefer fewer trees then shallower depth") {
    // Trivially separable data: every combination reaches F1 = 1, so the
    // tie-break selects the smallest forest with the shallowest depth.
    const Dataset ds = make_dataset(
        {"x"},
        {{1}, {2}, {3}, {4}, {5}, {6}, {7}, {8}, {101}, {102}, {103}, {104},
         {105}, {106}, {107}, {108}},
        {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1});
    ParamGrid grid;
    grid.n_trees = {10, 5};
    grid.max_depth = {std::nullopt, std::optional<std::size_t>(2)};
    grid.min_samples_split = {2};
    grid.max_features = {MaxFeatures::all()};
    const TuningResult result =
        grid_search(ds, grid, SmoteConfig{2, 1.0}, 2, RandomSource(11), 1);
    for (const auto& cell : result.table) CHECK(cell.mean_f1 == 1.0);
    CHECK(result.best_params.n_trees == 5);
    CHECK(result.best_params.max_depth == std::size_t(2));
}

TEST_SUITE_END();
