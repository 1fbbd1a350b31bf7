#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "imbalforest/dataset.hpp"
#include "imbalforest/random.hpp"

namespace imbalforest {

// Per-node candidate feature count: sqrt of the total, all, or an explicit
// count.
struct MaxFeatures {
    enum class Mode { sqrt_total, all, count };
    Mode mode = Mode::sqrt_total;
    std::size_t count = 0;

    static MaxFeatures sqrt_total() { return {Mode::sqrt_total, 0}; }
    static MaxFeatures all() { return {Mode::all, 0}; }
    static MaxFeatures exactly(std::size_t n) { return {Mode::count, n}; }

    // Resolved subset size for p features (>= 1).
    std::size_t resolve(std::size_t p) const;

    std::string to_string() const;          // "sqrt" | "all" | "<int>"
    static MaxFeatures parse(const std::string& s);

    bool operator==(const MaxFeatures&) const = default;
};

struct ForestParams {
    std::size_t n_trees = 100;
    std::optional<std::size_t> max_depth; // nullopt = unlimited
    std::size_t min_samples_split = 2;
    MaxFeatures max_features = MaxFeatures::sqrt_total();
    bool bootstrap = true;

    bool operator==(const ForestParams&) const = default;
};

// Array-backed tree node: feature_index < 0 marks a leaf carrying class
// counts; split nodes route feature <= threshold to the left child.
struct TreeNode {
    int feature_index = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::uint32_t n0 = 0; // leaf class counts
    std::uint32_t n1 = 0;

    bool is_leaf() const { return feature_index < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct Tree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    const TreeNode& leaf_for(std::span<const double> row) const;
    // 1 iff the routed leaf has n1 > n0 (tie votes 0).
    int vote(std::span<const double> row) const;

    bool operator==(const Tree&) const = default;
};

struct ForestModel {
    std::vector<Tree> trees;
    ForestParams params;
    std::vector<std::string> feature_names;
    std::uint64_t train_seed = 0; // stream key the tree streams derive from

    bool operator==(const ForestModel&) const = default;
};

// Binary Gini impurity 1 - p0^2 - p1^2 of a (n0, n1) count pair.
// Throws std::invalid_argument on an empty node.
double gini(std::size_t n0, std::size_t n1);

struct SplitCandidate {
    std::size_t feature_index = 0;
    double threshold = 0.0;
    double weighted_impurity = 0.0; // (nL*gini_L + nR*gini_R) / n
};

// Exhaustive search over the feature subset: candidate thresholds are
// midpoints between consecutive distinct sorted values; returns the split
// minimizing weighted child impurity, ties broken by (lower feature index,
// lower threshold). nullopt when no split strictly reduces impurity.
std::optional<SplitCandidate> best_split(const Dataset& ds,
                                         std::span<const std::size_t> rows,
                                         std::span<const std::size_t> feature_subset);

// CART growth over the given sample (row indices may repeat, e.g. bootstrap
// slots). Stops on purity, max_depth, min_samples_split, or no improving
// split. Each node's feature subset is drawn from rng.child("node/<path>")
// where <path> is the L/R path from the root, so the tree is a pure function
// of (sample, params, rng).
Tree grow_tree(const Dataset& ds, std::span<const std::size_t> sample_rows,
               const ForestParams& params, const RandomSource& rng);

// Trains params.n_trees trees; tree t bootstraps from rng.child("tree/t/
// bootstrap") and grows from rng.child("tree/t/grow"). Output is independent
// of the thread count.
ForestModel fit_forest(const Dataset& train, const ForestParams& params,
                       const RandomSource& rng, unsigned threads = 1);

// Fraction of trees voting fraud; score * n_trees is an integer.
double predict_score(const ForestModel& model, std::span<const double> row);
// 1 iff predict_score > threshold (strict).
int predict_label(const ForestModel& model, std::span<const double> row,
                  double threshold = 0.5);

std::vector<double> predict_scores(const ForestModel& model, const Dataset& ds,
                                   unsigned threads = 1);
std::vector<int> predict_labels(const ForestModel& model, const Dataset& ds,
                                double threshold = 0.5, unsigned threads = 1);

// Versioned, diffable text format; lossless round trip.
void save_model(const ForestModel& model, const std::filesystem::path& path);
ForestModel load_model(const std::filesystem::path& path);

} // namespace imbalforest
