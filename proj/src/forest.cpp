#include "imbalforest/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "imbalforest/numio.hpp"
#include "imbalforest/parallel.hpp"

namespace imbalforest {

std::size_t MaxFeatures::resolve(std::size_t p) const {
    switch (mode) {
        case Mode::sqrt_total:
            return std::max<std::size_t>(
                1, static_cast<std::size_t>(std::floor(std::sqrt(double(p)))));
        case Mode::all:
            return p;
        case Mode::count:
            return count;
    }
    return p;
}

std::string MaxFeatures::to_string() const {
    switch (mode) {
        case Mode::sqrt_total: return "sqrt";
        case Mode::all: return "all";
        case Mode::count: return std::to_string(count);
    }
    return "sqrt";
}

MaxFeatures MaxFeatures::parse(const std::string& s) {
    if (s == "sqrt") return sqrt_total();
    if (s == "all") return all();
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || v == 0)
        throw std::invalid_argument("invalid max_features '" + s +
                                    "' (expected sqrt, all, or a positive integer)");
    return exactly(static_cast<std::size_t>(v));
}

double gini(std::size_t n0, std::size_t n1) {
    if (n0 + n1 == 0)
        throw std::invalid_argument("gini: empty node");
    const double total = double(n0 + n1);
    const double p0 = double(n0) / total;
    const double p1 = double(n1) / total;
    return 1.0 - p0 * p0 - p1 * p1;
}

namespace {

inline double gini_pair(std::size_t n0, std::size_t n1) {
    const double total = double(n0 + n1);
    const double p0 = double(n0) / total;
    const double p1 = double(n1) / total;
    return 1.0 - p0 * p0 - p1 * p1;
}

inline double weighted_child_impurity(std::size_t l0, std::size_t l1,
                                      std::size_t r0, std::size_t r1) {
    const std::size_t nl = l0 + l1;
    const std::size_t nr = r0 + r1;
    return (double(nl) * gini_pair(l0, l1) + double(nr) * gini_pair(r0, r1)) /
           double(nl + nr);
}

// Midpoint of two consecutive distinct values; falls back to the lower value
// when rounding would push it to (or past) the upper one, so "<= threshold"
// always reproduces the scanned partition.
inline double split_midpoint(double lo, double hi) {
    const double mid = (lo + hi) * 0.5;
    if (!(mid >= lo) || mid >= hi) return lo;
    return mid;
}

void validate_params(const ForestParams& params, std::size_t p) {
    if (params.n_trees == 0)
        throw std::invalid_argument("n_trees must be positive");
    if (params.min_samples_split < 2)
        throw std::invalid_argument("min_samples_split must be >= 2");
    if (params.max_depth && *params.max_depth == 0)
        throw std::invalid_argument("max_depth must be positive (omit for unlimited)");
    if (params.max_features.mode == MaxFeatures::Mode::count &&
        (params.max_features.count == 0 || params.max_features.count > p))
        throw std::invalid_argument("explicit max_features (" +
                                    std::to_string(params.max_features.count) +
                                    ") must be in [1, feature count " +
                                    std::to_string(p) + "]");
}

// Per-feature row order of a dataset with the values alongside, shared by
// every tree of a fit.
struct FeaturePresort {
    std::vector<std::uint32_t> order; // row ids sorted by (value, row)
    std::vector<double> values;       // values in that order
};

// Grows one CART tree over a sample of (possibly repeated) dataset rows.
// Every feature keeps a value-sorted list of sample slots with the values in
// a parallel array, so split scans are sequential reads; a chosen split
// stably partitions each list in place, so no per-node sorting is needed.
class TreeTrainer {
public:
    // One trainer per worker; its buffers are reused across the trees that
    // worker grows.
    TreeTrainer(const Dataset& ds, const ForestParams& params)
        : ds_(ds), params_(params), p_(ds.n_features()) {}

    // Grows a tree from a sample whose sorted slot/value arrays are built by
    // sorting each feature directly.
    Tree train_by_sorting(std::span<const std::size_t> sample_rows,
                          const RandomSource& grow_src) {
        prepare(sample_rows, grow_src);
        std::vector<std::pair<double, std::uint32_t>> cells(n_);
        for (std::size_t f = 0; f < p_; ++f) {
            for (std::size_t s = 0; s < n_; ++s)
                cells[s] = {ds_.at(sample_rows_[s], f), std::uint32_t(s)};
            std::sort(cells.begin(), cells.end());
            auto* slots = slots_.data() + f * n_;
            auto* values = values_.data() + f * n_;
            for (std::size_t i = 0; i < n_; ++i) {
                values[i] = cells[i].first;
                slots[i] = cells[i].second;
            }
        }
        return grow();
    }

    // Grows a tree with the sorted arrays scattered from the shared presort
    // of the full training set. O(p * (N + n)), no sorting.
    Tree train_from_presort(std::span<const std::size_t> sample_rows,
                            const RandomSource& grow_src,
                            const std::vector<FeaturePresort>& presort) {
        prepare(sample_rows, grow_src);
        const std::size_t n_rows = ds_.n_rows();
        start_.assign(n_rows + 1, 0);
        for (std::size_t s = 0; s < n_; ++s) ++start_[sample_rows_[s] + 1];
        for (std::size_t r = 0; r < n_rows; ++r) start_[r + 1] += start_[r];
        slot_ids_.resize(n_);
        cursor_.assign(start_.begin(), start_.end() - 1);
        for (std::size_t s = 0; s < n_; ++s)
            slot_ids_[cursor_[sample_rows_[s]]++] = std::uint32_t(s);
        for (std::size_t f = 0; f < p_; ++f) {
            auto* slots = slots_.data() + f * n_;
            auto* values = values_.data() + f * n_;
            std::size_t pos = 0;
            const auto& feature = presort[f];
            for (std::size_t i = 0; i < feature.order.size(); ++i) {
                const std::uint32_t row = feature.order[i];
                for (std::uint32_t j = start_[row]; j < start_[row + 1]; ++j) {
                    slots[pos] = slot_ids_[j];
                    values[pos] = feature.values[i];
                    ++pos;
                }
            }
        }
        return grow();
    }

private:
    void prepare(std::span<const std::size_t> sample_rows,
                 const RandomSource& grow_src) {
        sample_rows_ = sample_rows;
        grow_src_ = grow_src;
        n_ = sample_rows.size();
        labels_.resize(n_);
        for (std::size_t s = 0; s < n_; ++s)
            labels_[s] = static_cast<std::uint8_t>(ds_.labels[sample_rows_[s]]);
        slots_.resize(p_ * n_);
        values_.resize(p_ * n_);
        slot_scratch_.resize(n_);
        value_scratch_.resize(n_);
        goes_left_.resize(n_);
        feature_buf_.resize(p_);
    }

    Tree grow() {
        Tree tree;
        tree.nodes.reserve(64);
        std::size_t n1 = 0;
        for (std::size_t s = 0; s < n_; ++s) n1 += labels_[s];
        build_node(tree, 0, n_, 0, "", n_ - n1, n1);
        return tree;
    }

    struct Best {
        bool found = false;
        std::size_t feature = 0;
        double threshold = 0.0;
        double weighted = 0.0;
        std::size_t l0 = 0, l1 = 0; // left-child label counts
    };

    static int emit_leaf(Tree& tree, std::size_t n0, std::size_t n1) {
        const int index = int(tree.nodes.size());
        TreeNode leaf;
        leaf.n0 = std::uint32_t(n0);
        leaf.n1 = std::uint32_t(n1);
        tree.nodes.push_back(leaf);
        return index;
    }

    // The cheap stopping conditions; "no improving split" still requires a
    // scan and is discovered inside build_node itself.
    bool is_terminal(std::size_t n0, std::size_t n1, std::size_t depth) const {
        return n0 == 0 || n1 == 0 || n0 + n1 < params_.min_samples_split ||
               (params_.max_depth && depth >= *params_.max_depth);
    }

    int build_node(Tree& tree, std::size_t lo, std::size_t hi, std::size_t depth,
                   const std::string& path, std::size_t n0, std::size_t n1) {
        Best best;
        if (!is_terminal(n0, n1, depth)) best = scan_subset(lo, hi, n0, n1, path);
        if (!best.found) return emit_leaf(tree, n0, n1);

        const int index = int(tree.nodes.size());
        tree.nodes.emplace_back();

        const std::size_t l0 = best.l0, l1 = best.l1;
        const std::size_t r0 = n0 - l0, r1 = n1 - l1;
        const std::size_t n_left = l0 + l1;
        // A child that is certain to become a leaf needs no slot lists, so
        // the partition can skip (or compact away) its side.
        const bool left_grows = !is_terminal(l0, l1, depth + 1);
        const bool right_grows = !is_terminal(r0, r1, depth + 1);

        if (left_grows || right_grows)
            partition(lo, hi, best.feature, best.threshold, n_left,
                      left_grows, right_grows);

        int left, right;
        if (left_grows) {
            left = build_node(tree, lo, lo + n_left, depth + 1, path + "L", l0, l1);
        } else {
            left = emit_leaf(tree, l0, l1);
        }
        if (right_grows) {
            const std::size_t rlo = left_grows ? lo + n_left : lo;
            right = build_node(tree, rlo, rlo + (hi - lo - n_left), depth + 1,
                               path + "R", r0, r1);
        } else {
            right = emit_leaf(tree, r0, r1);
        }

        auto& node = tree.nodes[std::size_t(index)];
        node.feature_index = int(best.feature);
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        return index;
    }

    Best scan_subset(std::size_t lo, std::size_t hi, std::size_t n0,
                     std::size_t n1, const std::string& path) {
        auto stream = grow_src_.child("node/" + path).stream();
        const std::size_t m = params_.max_features.resolve(p_);
        std::iota(feature_buf_.begin(), feature_buf_.end(), std::uint32_t(0));
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = i + stream.next_below(p_ - i);
            std::swap(feature_buf_[i], feature_buf_[j]);
        }
        std::sort(feature_buf_.begin(), feature_buf_.begin() + std::ptrdiff_t(m));

        const double parent = gini_pair(n0, n1);
        Best best;
        for (std::size_t i = 0; i < m; ++i)
            scan_feature(lo, hi, feature_buf_[i], n0, n1, parent, best);
        return best;
    }

    // Walks the value-sorted segment of one feature. Candidate thresholds
    // are the midpoints between consecutive distinct values, but a boundary
    // strictly inside a single-class run can never be optimal (the weighted
    // Gini of a cut is concave along such a run), so only boundaries
    // adjacent to a class change, to a mixed equal-value group, or at the
    // segment's first/last cut position are evaluated. Updates `best` only
    // on strict improvement, so earlier features / lower thresholds win
    // ties.
    void scan_feature(std::size_t lo, std::size_t hi, std::size_t f,
                      std::size_t n0, std::size_t n1, double parent,
                      Best& best) {
        const auto* slots = slots_.data() + f * n_;
        const auto* values = values_.data() + f * n_;

        const auto consider = [&](std::size_t l0, std::size_t l1, double v_lo,
                                  double v_hi) {
            const double weighted =
                weighted_child_impurity(l0, l1, n0 - l0, n1 - l1);
            const bool improves =
                weighted < parent && (!best.found || weighted < best.weighted);
            if (improves) {
                best.found = true;
                best.feature = f;
                best.threshold = split_midpoint(v_lo, v_hi);
                best.weighted = weighted;
                best.l0 = l0;
                best.l1 = l1;
            }
        };

        // Counts before the previous equal-value group, then the group
        // itself; the boundary after a group is decided once the next group
        // has been read, since the skip rule needs both sides.
        std::size_t before0 = 0, before1 = 0;
        std::size_t group0, group1;
        double group_v;
        bool have_pending = false;
        std::size_t pend_l0 = 0, pend_l1 = 0;
        double pend_lo = 0.0, pend_hi = 0.0;

        std::size_t i = lo;
        {
            group_v = values[lo];
            std::size_t g1 = 0, count = 0;
            while (i < hi && values[i] == group_v) {
                g1 += labels_[slots[i]];
                ++count;
                ++i;
            }
            group1 = g1;
            group0 = count - g1;
        }
        while (i < hi) {
            const double next_v = values[i];
            std::size_t g1 = 0, count = 0;
            while (i < hi && values[i] == next_v) {
                g1 += labels_[slots[i]];
                ++count;
                ++i;
            }
            const std::size_t next1 = g1;
            const std::size_t next0 = count - g1;

            const std::size_t l0 = before0 + group0;
            const std::size_t l1 = before1 + group1;
            const bool group_pure = group0 == 0 || group1 == 0;
            const bool next_pure = next0 == 0 || next1 == 0;
            const bool same_class = group_pure && next_pure &&
                                    (group1 > 0) == (next1 > 0);
            const bool first_cut = before0 == 0 && before1 == 0;
            if (first_cut || !same_class) {
                consider(l0, l1, group_v, next_v);
                have_pending = false;
            } else {
                // Interior of a run; only matters if it turns out to be the
                // segment's final boundary.
                pend_l0 = l0;
                pend_l1 = l1;
                pend_lo = group_v;
                pend_hi = next_v;
                have_pending = true;
            }
            before0 += group0;
            before1 += group1;
            group0 = next0;
            group1 = next1;
            group_v = next_v;
        }
        if (have_pending) consider(pend_l0, pend_l1, pend_lo, pend_hi);
    }

    // Stable in-place partition of the feature segments by the chosen
    // predicate. Sides whose child will not grow further are dropped; a
    // surviving right child is compacted to the front of the segment when
    // the left side is dropped.
    void partition(std::size_t lo, std::size_t hi, std::size_t feature,
                   double threshold, std::size_t n_left, bool keep_left,
                   bool keep_right) {
        {
            const auto* slots = slots_.data() + feature * n_;
            const auto* values = values_.data() + feature * n_;
            for (std::size_t i = lo; i < hi; ++i)
                goes_left_[slots[i]] = values[i] <= threshold;
        }
        // The kept side is written in place as the segment is read (the
        // write cursor never passes the read cursor); in the both-kept case
        // the right side goes through scratch and is appended afterwards.
        for (std::size_t f = 0; f < p_; ++f) {
            auto* slots = slots_.data() + f * n_;
            auto* values = values_.data() + f * n_;
            std::size_t w = lo, wr = 0;
            for (std::size_t i = lo; i < hi; ++i) {
                const std::uint32_t slot = slots[i];
                const double v = values[i];
                if (goes_left_[slot]) {
                    if (keep_left) {
                        slots[w] = slot;
                        values[w] = v;
                        ++w;
                    }
                } else if (keep_right) {
                    if (keep_left) {
                        slot_scratch_[wr] = slot;
                        value_scratch_[wr] = v;
                        ++wr;
                    } else {
                        slots[w] = slot;
                        values[w] = v;
                        ++w;
                    }
                }
            }
            if (keep_left && keep_right) {
                std::copy_n(slot_scratch_.data(), wr, slots + lo + n_left);
                std::copy_n(value_scratch_.data(), wr, values + lo + n_left);
            }
        }
    }

    const Dataset& ds_;
    const ForestParams& params_;
    std::size_t p_;
    std::span<const std::size_t> sample_rows_;
    RandomSource grow_src_{0};
    std::size_t n_ = 0;
    std::vector<std::uint8_t> labels_;
    std::vector<std::uint32_t> slots_; // p_ blocks of n_ slot ids
    std::vector<double> values_;       // values parallel to slots_
    std::vector<std::uint32_t> slot_scratch_;
    std::vector<double> value_scratch_;
    std::vector<std::uint8_t> goes_left_;
    std::vector<std::uint32_t> feature_buf_;
    std::vector<std::uint32_t> start_, slot_ids_, cursor_;
};

std::vector<FeaturePresort> presort_features(const Dataset& ds) {
    std::vector<FeaturePresort> presort(ds.n_features());
    std::vector<std::pair<double, std::uint32_t>> cells(ds.n_rows());
    for (std::size_t f = 0; f < ds.n_features(); ++f) {
        for (std::size_t r = 0; r < ds.n_rows(); ++r)
            cells[r] = {ds.at(r, f), std::uint32_t(r)};
        std::sort(cells.begin(), cells.end());
        auto& feature = presort[f];
        feature.order.resize(cells.size());
        feature.values.resize(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            feature.values[i] = cells[i].first;
            feature.order[i] = cells[i].second;
        }
    }
    return presort;
}

} // namespace

std::optional<SplitCandidate> best_split(const Dataset& ds,
                                         std::span<const std::size_t> rows,
                                         std::span<const std::size_t> feature_subset) {
    if (rows.size() < 2)
        throw std::invalid_argument("best_split: need at least 2 rows");
    if (feature_subset.empty())
        throw std::invalid_argument("best_split: empty feature subset");

    std::size_t n1 = 0;
    for (std::size_t r : rows) n1 += std::size_t(ds.labels[r]);
    const std::size_t n0 = rows.size() - n1;
    const double parent = gini_pair(n0, n1);

    std::vector<std::size_t> features(feature_subset.begin(), feature_subset.end());
    std::sort(features.begin(), features.end());

    std::optional<SplitCandidate> best;
    std::vector<std::pair<double, std::uint8_t>> cells(rows.size());
    for (std::size_t f : features) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            cells[i] = {ds.at(rows[i], f),
                        static_cast<std::uint8_t>(ds.labels[rows[i]])};
        std::sort(cells.begin(), cells.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::size_t l0 = 0, l1 = 0;
        double prev = cells[0].first;
        for (const auto& [v, label] : cells) {
            if (v > prev) {
                const double weighted =
                    weighted_child_impurity(l0, l1, n0 - l0, n1 - l1);
                if (weighted < parent && (!best || weighted < best->weighted_impurity))
                    best = SplitCandidate{f, split_midpoint(prev, v), weighted};
                prev = v;
            }
            if (label) ++l1; else ++l0;
        }
    }
    return best;
}

Tree grow_tree(const Dataset& ds, std::span<const std::size_t> sample_rows,
               const ForestParams& params, const RandomSource& rng) {
    if (sample_rows.empty())
        throw std::invalid_argument("grow_tree: empty input");
    validate_params(params, ds.n_features());
    if (ds.n_features() == 0) {
        Tree tree;
        std::size_t n1 = 0;
        for (std::size_t r : sample_rows) n1 += std::size_t(ds.labels[r]);
        TreeNode leaf;
        leaf.n0 = std::uint32_t(sample_rows.size() - n1);
        leaf.n1 = std::uint32_t(n1);
        tree.nodes.push_back(leaf);
        return tree;
    }
    TreeTrainer trainer(ds, params);
    return trainer.train_by_sorting(sample_rows, rng);
}

ForestModel fit_forest(const Dataset& train, const ForestParams& params,
                       const RandomSource& rng, unsigned threads) {
    if (train.n_rows() < 2)
        throw std::invalid_argument("fit_forest: need at least 2 rows");
    if (train.n_features() == 0)
        throw std::invalid_argument("fit_forest: dataset has no features");
    const auto [n0, n1] = class_counts(train);
    if (n0 == 0 || n1 == 0)
        throw std::invalid_argument("fit_forest: single-class training set");
    validate_params(params, train.n_features());

    const auto presort = presort_features(train);
    const std::size_t n = train.n_rows();

    ForestModel model;
    model.params = params;
    model.feature_names = train.feature_names;
    model.train_seed = rng.key();
    model.trees.resize(params.n_trees);

    // Each worker grows an interleaved share of the trees, reusing one
    // trainer arena; tree t depends only on its own child streams, so the
    // model is identical for any worker count.
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(
        std::max(1u, threads), params.n_trees));
    parallel_for(workers, workers, [&](std::size_t w) {
        TreeTrainer trainer(train, params);
        std::vector<std::size_t> sample(n);
        for (std::size_t t = w; t < params.n_trees; t += workers) {
            const auto tree_src = rng.child("tree", t);
            if (params.bootstrap) {
                auto stream = tree_src.child("bootstrap").stream();
                for (std::size_t i = 0; i < n; ++i)
                    sample[i] = stream.next_below(n);
            } else {
                std::iota(sample.begin(), sample.end(), std::size_t(0));
            }
            model.trees[t] =
                trainer.train_from_presort(sample, tree_src.child("grow"), presort);
        }
    });
    return model;
}

const TreeNode& Tree::leaf_for(std::span<const double> row) const {
    const TreeNode* node = &nodes[0];
    while (!node->is_leaf())
        node = row[std::size_t(node->feature_index)] <= node->threshold
                   ? &nodes[std::size_t(node->left)]
                   : &nodes[std::size_t(node->right)];
    return *node;
}

int Tree::vote(std::span<const double> row) const {
    const TreeNode& leaf = leaf_for(row);
    return leaf.n1 > leaf.n0 ? 1 : 0;
}

double predict_score(const ForestModel& model, std::span<const double> row) {
    if (row.size() != model.feature_names.size())
        throw std::invalid_argument("feature-count mismatch: row has " +
                                    std::to_string(row.size()) +
                                    " values, model expects " +
                                    std::to_string(model.feature_names.size()));
    std::size_t votes = 0;
    for (const auto& tree : model.trees) votes += std::size_t(tree.vote(row));
    return double(votes) / double(model.trees.size());
}

int predict_label(const ForestModel& model, std::span<const double> row,
                  double threshold) {
    return predict_score(model, row) > threshold ? 1 : 0;
}

std::vector<double> predict_scores(const ForestModel& model, const Dataset& ds,
                                   unsigned threads) {
    if (ds.n_features() != model.feature_names.size())
        throw std::invalid_argument("feature-count mismatch: dataset has " +
                                    std::to_string(ds.n_features()) +
                                    " features, model expects " +
                                    std::to_string(model.feature_names.size()));
    std::vector<double> scores(ds.n_rows());
    parallel_for(ds.n_rows(), threads, [&](std::size_t r) {
        std::size_t votes = 0;
        const auto row = ds.row(r);
        for (const auto& tree : model.trees) votes += std::size_t(tree.vote(row));
        scores[r] = double(votes) / double(model.trees.size());
    });
    return scores;
}

std::vector<int> predict_labels(const ForestModel& model, const Dataset& ds,
                                double threshold, unsigned threads) {
    const auto scores = predict_scores(model, ds, threads);
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        labels[i] = scores[i] > threshold ? 1 : 0;
    return labels;
}

namespace {

constexpr const char* kModelMagic = "imbalforest model v1";

void write_node(std::ostream& out, const Tree& tree, int index, int depth) {
    const TreeNode& node = tree.nodes[std::size_t(index)];
    for (int i = 0; i < depth; ++i) out << "  ";
    if (node.is_leaf()) {
        out << "leaf " << node.n0 << ' ' << node.n1 << '\n';
        return;
    }
    out << "split " << node.feature_index << ' ' << format_double(node.threshold)
        << '\n';
    write_node(out, tree, node.left, depth + 1);
    write_node(out, tree, node.right, depth + 1);
}

struct ModelReader {
    const std::vector<std::string>& lines;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("corrupt model file: " + what +
                                 (pos < lines.size()
                                      ? " (line " + std::to_string(pos + 1) + ")"
                                      : " (unexpected end of file)"));
    }

    std::string next_line() {
        if (pos >= lines.size()) fail("truncated");
        std::string line = lines[pos++];
        const std::size_t start = line.find_first_not_of(' ');
        return start == std::string::npos ? std::string() : line.substr(start);
    }

    // Expects "key rest..." and returns rest.
    std::string expect(const std::string& key) {
        const std::string line = next_line();
        if (line.rfind(key + " ", 0) != 0) fail("expected '" + key + " ...'");
        return line.substr(key.size() + 1);
    }

    int read_node(Tree& tree) {
        const std::string line = next_line();
        const int index = int(tree.nodes.size());
        tree.nodes.emplace_back();
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "leaf") {
            long long n0 = -1, n1 = -1;
            ss >> n0 >> n1;
            if (!ss || n0 < 0 || n1 < 0 || (n0 == 0 && n1 == 0))
                fail("bad leaf record '" + line + "'");
            tree.nodes[std::size_t(index)].n0 = std::uint32_t(n0);
            tree.nodes[std::size_t(index)].n1 = std::uint32_t(n1);
            return index;
        }
        if (tag == "split") {
            long long feature = -1;
            std::string threshold_text;
            ss >> feature >> threshold_text;
            double threshold = 0.0;
            if (!ss || feature < 0 || !parse_double(threshold_text, threshold))
                fail("bad split record '" + line + "'");
            const int left = read_node(tree);
            const int right = read_node(tree);
            auto& node = tree.nodes[std::size_t(index)];
            node.feature_index = int(feature);
            node.threshold = threshold;
            node.left = left;
            node.right = right;
            return index;
        }
        fail("unknown node tag '" + tag + "'");
    }
};

} // namespace

void save_model(const ForestModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open file for writing: " + path.string());
    out << kModelMagic << '\n';
    out << "n_trees " << model.params.n_trees << '\n';
    out << "max_depth "
        << (model.params.max_depth ? std::to_string(*model.params.max_depth)
                                   : std::string("unlimited"))
        << '\n';
    out << "min_samples_split " << model.params.min_samples_split << '\n';
    out << "max_features " << model.params.max_features.to_string() << '\n';
    out << "bootstrap " << (model.params.bootstrap ? "true" : "false") << '\n';
    out << "train_seed " << model.train_seed << '\n';
    out << "n_features " << model.feature_names.size() << '\n';
    for (const auto& name : model.feature_names) out << "feature " << name << '\n';
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        out << "tree " << t << '\n';
        write_node(out, model.trees[t], 0, 1);
    }
    out << "end\n";
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

ForestModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }

    if (lines.empty() || lines[0] != kModelMagic) {
        if (!lines.empty() && lines[0].rfind("imbalforest model", 0) == 0)
            throw std::runtime_error("unsupported model version: '" + lines[0] + "'");
        throw std::runtime_error(path.string() + " is not an imbalforest model file");
    }

    ModelReader reader{lines, 1};
    ForestModel model;
    try {
        model.params.n_trees = std::stoull(reader.expect("n_trees"));
        const std::string depth = reader.expect("max_depth");
        if (depth == "unlimited")
            model.params.max_depth.reset();
        else
            model.params.max_depth = std::stoull(depth);
        model.params.min_samples_split =
            std::stoull(reader.expect("min_samples_split"));
        model.params.max_features = MaxFeatures::parse(reader.expect("max_features"));
        model.params.bootstrap = reader.expect("bootstrap") == "true";
        model.train_seed = std::stoull(reader.expect("train_seed"));
        const std::size_t n_features = std::stoull(reader.expect("n_features"));
        for (std::size_t f = 0; f < n_features; ++f)
            model.feature_names.push_back(reader.expect("feature"));
    } catch (const std::invalid_argument&) {
        reader.fail("malformed header field");
    } catch (const std::out_of_range&) {
        reader.fail("malformed header field");
    }

    model.trees.reserve(model.params.n_trees);
    for (std::size_t t = 0; t < model.params.n_trees; ++t) {
        const std::string tag = reader.expect("tree");
        if (tag != std::to_string(t)) reader.fail("unexpected tree index " + tag);
        Tree tree;
        reader.read_node(tree);
        model.trees.push_back(std::move(tree));
    }
    if (reader.next_line() != "end") reader.fail("missing end marker");
    return model;
}

} // namespace imbalforest
