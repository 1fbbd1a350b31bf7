#include <doctest.h>

#include <cmath>
#include <numeric>

#include "imbalforest/dataio.hpp"
#include "imbalforest/forest.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace imbalforest;
using test_support::make_dataset;

namespace {

std::vector<std::size_t> all_rows(const Dataset& ds) {
    std::vector<std::size_t> rows(ds.n_rows());
    std::iota(rows.begin(), rows.end(), std::size_t(0));
    return rows;
}

std::vector<std::size_t> all_features(const Dataset& ds) {
    std::vector<std::size_t> features(ds.n_features());
    std::iota(features.begin(), features.end(), std::size_t(0));
    return features;
}

// A leaf-only tree that always votes the given class.
Tree constant_tree(int vote) {
    Tree tree;
    TreeNode leaf;
    leaf.n0 = vote == 0 ? 2 : 1;
    leaf.n1 = vote == 0 ? 1 : 2;
    tree.nodes.push_back(leaf);
    return tree;
}

ForestModel vote_model(const std::vector<int>& votes) {
    ForestModel model;
    model.feature_names = {"x"};
    model.params.n_trees = votes.size();
    for (int v : votes) model.trees.push_back(constant_tree(v));
    return model;
}

// Structural equality between a grown tree and the exhaustive oracle tree.
bool matches_oracle(const Tree& tree, int index, const oracles::OracleNode& node) {
    const TreeNode& mine = tree.nodes[std::size_t(index)];
    if (node.leaf) {
        return mine.is_leaf() && mine.n0 == node.n0 && mine.n1 == node.n1;
    }
    if (mine.is_leaf()) return false;
    if (std::size_t(mine.feature_index) != node.feature ||
        mine.threshold != node.threshold)
        return false;
    return matches_oracle(tree, mine.left, *node.left) &&
           matches_oracle(tree, mine.right, *node.right);
}

ForestParams full_capacity_tree_params() {
    ForestParams params;
    params.n_trees = 1;
    params.bootstrap = false;
    params.max_features = MaxFeatures::all();
    params.min_samples_split = 2;
    params.max_depth.reset();
    return params;
}

} // namespace

TEST_SUITE_BEGIN("forest");

TEST_CASE("gini impurity of count pairs") {
    CHECK(gini(5, 0) == 0.0);
    CHECK(gini(0, 7) == 0.0);
    CHECK(gini(4, 4) == 0.5);
    CHECK(gini(2, 6) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK_THROWS_AS(gini(0, 0), std::invalid_argument);
}

TEST_CASE("best_split finds the separating midpoint") {
    const Dataset ds = make_dataset({"x"}, {{1}, {2}, {3}, {4}}, {0, 0, 1, 1});
    const auto split = best_split(ds, all_rows(ds), all_features(ds));
    REQUIRE(split.has_value());
    CHECK(split->feature_index == 0);
    CHECK(split->threshold == 2.5);
    CHECK(split->weighted_impurity == 0.0);
}

TEST_CASE("best_split returns nothing on pure or constant data") {
    const Dataset pure = make_dataset({"x"}, {{1}, {2}, {3}}, {1, 1, 1});
    CHECK(!best_split(pure, all_rows(pure), all_features(pure)).has_value());
    const Dataset constant = make_dataset({"x", "y"}, {{5, 5}, {5, 5}}, {0, 1});
    CHECK(!best_split(constant, all_rows(constant), all_features(constant))
               .has_value());
}

TEST_CASE("best_split breaks ties toward the lower feature and threshold") {
    // Both features separate perfectly; feature 0 must win.
    const Dataset ds =
        make_dataset({"a", "b"}, {{1, 10}, {2, 20}, {3, 30}, {4, 40}}, {0, 0, 1, 1});
    const auto split = best_split(ds, all_rows(ds), all_features(ds));
    REQUIRE(split.has_value());
    CHECK(split->feature_index == 0);
    // Symmetric labels: thresholds 1.5 and 2.5 tie on one feature; the lower
    // one wins.
    const Dataset sym = make_dataset({"x"}, {{1}, {2}, {3}}, {0, 1, 0});
    const auto tie = best_split(sym, all_rows(sym), all_features(sym));
    REQUIRE(tie.has_value());
    CHECK(tie->threshold == 1.5);
}

TEST_CASE("best_split agrees with the exhaustive oracle on random data") {
    auto stream = RandomSource(101, "split").stream();
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t rows = 2 + stream.next_below(40);
        const std::size_t cols = 1 + stream.next_below(4);
        const Dataset ds = test_support::random_dataset(stream, rows, cols);
        const auto mine = best_split(ds, all_rows(ds), all_features(ds));
        const auto oracle = oracles::exhaustive_best_split(ds, all_rows(ds));
        REQUIRE(mine.has_value() == oracle.has_value());
        if (mine) {
            CHECK(mine->feature_index == oracle->feature);
            CHECK(mine->threshold == oracle->threshold);
            CHECK(mine->weighted_impurity == doctest::Approx(oracle->weighted));
        }
    }
}

TEST_CASE("grow_tree stops on a single row") {
    const Dataset ds = make_dataset({"x"}, {{5}}, {1});
    const std::vector<std::size_t> rows{0};
    const Tree tree = grow_tree(ds, rows, full_capacity_tree_params(), RandomSource(1));
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].is_leaf());
    CHECK(tree.nodes[0].n1 == 1);
}

TEST_CASE("grow_tree splits separable 1-D data into two pure leaves") {
    const Dataset ds =
        make_dataset({"x"}, {{1}, {2}, {3}, {10}, {11}, {12}}, {0, 0, 0, 1, 1, 1});
    const Tree tree =
        grow_tree(ds, all_rows(ds), full_capacity_tree_params(), RandomSource(2));
    REQUIRE(tree.nodes.size() == 3);
    CHECK(!tree.nodes[0].is_leaf());
    CHECK(tree.nodes[0].threshold == 6.5);
    const TreeNode& left = tree.nodes[std::size_t(tree.nodes[0].left)];
    const TreeNode& right = tree.nodes[std::size_t(tree.nodes[0].right)];
    CHECK((left.is_leaf() && left.n0 == 3 && left.n1 == 0));
    CHECK((right.is_leaf() && right.n0 == 0 && right.n1 == 3));
}

TEST_CASE("grow_tree respects max_depth") {
    auto stream = RandomSource(102, "depth").stream();
    const Dataset ds = test_support::random_dataset(stream, 64, 3);
    ForestParams params = full_capacity_tree_params();
    params.max_depth = 2;
    const Tree tree = grow_tree(ds, all_rows(ds), params, RandomSource(3));
    // Depth-2 trees hold at most 7 nodes.
    CHECK(tree.nodes.size() <= 7);
}

TEST_CASE("grow_tree is deterministic in the stream") {
    auto stream = RandomSource(103, "grow").stream();
    const Dataset ds = test_support::random_dataset(stream, 40, 4);
    ForestParams params;
    params.max_features = MaxFeatures::sqrt_total();
    const Tree a = grow_tree(ds, all_rows(ds), params, RandomSource(9, "t"));
    const Tree b = grow_tree(ds, all_rows(ds), params, RandomSource(9, "t"));
    CHECK(a == b);
}

TEST_CASE("single full-capacity tree reproduces the exhaustive oracle tree") {
    auto stream = RandomSource(104, "oracle").stream();
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t rows = 2 + stream.next_below(49);
        const std::size_t cols = 1 + stream.next_below(4);
        const Dataset ds = test_support::random_dataset(stream, rows, cols);
        const ForestModel model =
            fit_forest(ds, full_capacity_tree_params(), RandomSource(trial), 1);
        const auto oracle = oracles::exhaustive_tree(ds, all_rows(ds));
        CHECK(matches_oracle(model.trees[0], 0, *oracle));
    }
}

TEST_CASE("full-capacity tree attains 100% training accuracy") {
    auto stream = RandomSource(105, "consistency").stream();
    const Dataset ds = test_support::random_dataset(stream, 120, 3);
    const ForestModel model =
        fit_forest(ds, full_capacity_tree_params(), RandomSource(1), 1);
    for (std::size_t r = 0; r < ds.n_rows(); ++r)
        CHECK(predict_label(model, ds.row(r)) == ds.labels[r]);
}

TEST_CASE("grow_tree and fit_forest build identical trees from one stream") {
    // The standalone grower sorts each feature per tree; the forest fitter
    // scatters from a shared presort. Same sample, same stream, same tree.
    auto stream = RandomSource(110, "paths").stream();
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset ds = test_support::random_dataset(
            stream, 30 + stream.next_below(60), 1 + stream.next_below(5));
        ForestParams params;
        params.n_trees = 1;
        params.bootstrap = false;
        params.max_features = MaxFeatures::sqrt_total();
        const RandomSource rng(std::uint64_t(trial), "equiv");
        const ForestModel model = fit_forest(ds, params, rng, 1);
        const Tree direct =
            grow_tree(ds, all_rows(ds), params, rng.child("tree", 0).child("grow"));
        CHECK(model.trees[0] == direct);
    }
}

TEST_CASE("fit_forest output is independent of the thread count") {
    SynthSpec spec{400, 0.2, 5, 1.5, false};
    const Dataset ds = generate_synthetic(spec, RandomSource(106));
    ForestParams params;
    params.n_trees = 24;
    const ForestModel a = fit_forest(ds, params, RandomSource(7, "fit"), 1);
    const ForestModel b = fit_forest(ds, params, RandomSource(7, "fit"), 4);
    const ForestModel c = fit_forest(ds, params, RandomSource(7, "fit"), 8);
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("fit_forest validates its inputs") {
    const Dataset single = make_dataset({"x"}, {{1}, {2}}, {0, 0});
    CHECK_THROWS_WITH_AS(fit_forest(single, ForestParams{}, RandomSource(1), 1),
                         doctest::Contains("single-class"), std::invalid_argument);
    const Dataset ok = make_dataset({"x", "y"}, {{1, 2}, {3, 4}}, {0, 1});
    ForestParams bad;
    bad.max_features = MaxFeatures::exactly(5);
    CHECK_THROWS_AS(fit_forest(ok, bad, RandomSource(1), 1), std::invalid_argument);
    bad.max_features = MaxFeatures::exactly(2);
    bad.n_trees = 0;
    CHECK_THROWS_AS(fit_forest(ok, bad, RandomSource(1), 1), std::invalid_argument);
}

TEST_CASE("predict_score is the exact vote fraction") {
    const std::vector<double> row{0.0};
    CHECK(predict_score(vote_model({1, 1, 1, 1}), row) == 1.0);
    CHECK(predict_score(vote_model({1, 1, 0, 0}), row) == 0.5);
    CHECK(predict_score(vote_model({0, 0, 0}), row) == 0.0);
    // score * n_trees is an integer
    const ForestModel mixed = vote_model({1, 0, 1, 1, 0, 1, 0});
    const double score = predict_score(mixed, row);
    CHECK(score * 7.0 == std::round(score * 7.0));
}

TEST_CASE("leaf ties vote for the legitimate class") {
    Tree tie;
    TreeNode leaf;
    leaf.n0 = 3;
    leaf.n1 = 3;
    tie.nodes.push_back(leaf);
    ForestModel model;
    model.feature_names = {"x"};
    model.params.n_trees = 1;
    model.trees.push_back(tie);
    CHECK(predict_score(model, std::vector<double>{0.0}) == 0.0);
}

TEST_CASE("predict_label thresholds strictly") {
    const std::vector<double> row{0.0};
    CHECK(predict_label(vote_model({1, 1, 1, 1}), row, 0.5) == 1);
    CHECK(predict_label(vote_model({1, 1, 0, 0}), row, 0.5) == 0); // exactly 0.5
    CHECK(predict_label(vote_model({1, 0, 0, 0}), row, 0.0) == 1);
    CHECK(predict_label(vote_model({0, 0, 0, 0}), row, 0.0) == 0);
    CHECK(predict_label(vote_model({1, 1, 1, 1}), row, 1.0) == 0);
}

TEST_CASE("raising the threshold never flips a prediction to fraud") {
    SynthSpec spec{200, 0.25, 3, 1.0, false};
    const Dataset ds = generate_synthetic(spec, RandomSource(107));
    ForestParams params;
    params.n_trees = 15;
    const ForestModel model = fit_forest(ds, params, RandomSource(2), 1);
    for (const double lo : {0.1, 0.3, 0.5}) {
        for (std::size_t r = 0; r < 50; ++r) {
            const int at_lo = predict_label(model, ds.row(r), lo);
            const int at_hi = predict_label(model, ds.row(r), lo + 0.3);
            CHECK(at_hi <= at_lo);
        }
    }
}

TEST_CASE("predict rejects a feature-count mismatch") {
    const ForestModel model = vote_model({1});
    CHECK_THROWS_WITH_AS(predict_score(model, std::vector<double>{1.0, 2.0}),
                         doctest::Contains("feature-count mismatch"),
                         std::invalid_argument);
}

TEST_CASE("models round-trip through the text format") {
    test_support::TempDir dir("model");
    SynthSpec spec{150, 0.3, 4, 1.0, false};
    const Dataset ds = generate_synthetic(spec, RandomSource(108));
    ForestParams params;
    params.n_trees = 9;
    params.max_depth = 6;
    params.max_features = MaxFeatures::exactly(2);
    const ForestModel model = fit_forest(ds, params, RandomSource(3), 1);
    save_model(model, dir.file("m.forest"));
    const ForestModel back = load_model(dir.file("m.forest"));
    CHECK(back == model);

    // Predictions agree on 1,000 random rows.
    auto stream = RandomSource(109, "rows").stream();
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> row(4);
        for (double& v : row) v = stream.next_double() * 6.0 - 3.0;
        CHECK(predict_score(model, row) == predict_score(back, row));
    }
}

TEST_CASE("load_model rejects unknown versions and corrupt files") {
    test_support::TempDir dir("model");
    test_support::write_file(dir.file("v9.forest"),
                             "imbalforest model v9\nn_trees 1\n");
    CHECK_THROWS_WITH_AS(load_model(dir.file("v9.forest")),
                         doctest::Contains("version"), std::runtime_error);
    test_support::write_file(dir.file("junk.forest"), "not a model\n");
    CHECK_THROWS_AS(load_model(dir.file("junk.forest")), std::runtime_error);

    const Dataset ds = make_dataset({"x"}, {{1}, {2}, {3}, {4}}, {0, 0, 1, 1});
    const ForestModel model =
        fit_forest(ds, full_capacity_tree_params(), RandomSource(4), 1);
    save_model(model, dir.file("ok.forest"));
    std::string text = test_support::read_file(dir.file("ok.forest"));
    text.resize(text.size() / 2); // truncate mid-tree
    test_support::write_file(dir.file("cut.forest"), text);
    CHECK_THROWS_WITH_AS(load_model(dir.file("cut.forest")),
                         doctest::Contains("corrupt"), std::runtime_error);
}

TEST_CASE("max_features parsing and resolution") {
    CHECK(MaxFeatures::parse("sqrt").resolve(10) == 3);
    CHECK(MaxFeatures::parse("sqrt").resolve(1) == 1);
    CHECK(MaxFeatures::parse("all").resolve(7) == 7);
    CHECK(MaxFeatures::parse("4").resolve(9) == 4);
    CHECK_THROWS_AS(MaxFeatures::parse("0"), std::invalid_argument);
    CHECK_THROWS_AS(MaxFeatures::parse("bogus"), std::invalid_argument);
    CHECK(MaxFeatures::sqrt_total().to_string() == "sqrt");
    CHECK(MaxFeatures::exactly(3).to_string() == "3");
}

TEST_SUITE_END();
