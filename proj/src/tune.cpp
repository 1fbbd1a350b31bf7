#include "imbalforest/tune.hpp"

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>

#include "imbalforest/eval.hpp"
#include "imbalforest/parallel.hpp"

namespace imbalforest {

void ParamGrid::validate() const {
    if (n_trees.empty() || max_depth.empty() || min_samples_split.empty() ||
        max_features.empty())
        throw std::invalid_argument("param grid: every axis needs at least one value");
}

std::size_t ParamGrid::combination_count() const {
    return n_trees.size() * max_depth.size() * min_samples_split.size() *
           max_features.size();
}

std::vector<ForestParams> ParamGrid::combinations(bool bootstrap) const {
    validate();
    std::vector<ForestParams> combos;
    combos.reserve(combination_count());
    for (const std::size_t nt : n_trees)
        for (const auto& md : max_depth)
            for (const std::size_t mss : min_samples_split)
                for (const auto& mf : max_features) {
                    ForestParams params;
                    params.n_trees = nt;
                    params.max_depth = md;
                    params.min_samples_split = mss;
                    params.max_features = mf;
                    params.bootstrap = bootstrap;
                    combos.push_back(params);
                }
    return combos;
}

std::vector<std::vector<std::size_t>> stratified_kfold(const Dataset& ds,
                                                       std::size_t k,
                                                       const RandomSource& rng) {
    if (k < 2)
        throw std::invalid_argument("stratified_kfold: k must be >= 2");
    const auto [n0, n1] = class_counts(ds);
    if (n0 < k || n1 < k)
        throw std::invalid_argument("stratified_kfold: class " +
                                    std::string(n0 < k ? "0" : "1") + " has " +
                                    std::to_string(n0 < k ? n0 : n1) +
                                    " rows, fewer than k = " + std::to_string(k));

    std::vector<std::vector<std::size_t>> folds(k);
    for (int cls : {0, 1}) {
        std::vector<std::size_t> indices;
        for (std::size_t r = 0; r < ds.n_rows(); ++r)
            if (ds.labels[r] == cls) indices.push_back(r);
        auto stream = rng.child("kfold/class", std::uint64_t(cls)).stream();
        stream.shuffle(indices);
        for (std::size_t i = 0; i < indices.size(); ++i)
            folds[i % k].push_back(indices[i]);
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

namespace {

Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.feature_names = ds.feature_names;
    out.features.reserve(rows.size() * ds.n_features());
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) {
        const auto row = ds.row(r);
        out.features.insert(out.features.end(), row.begin(), row.end());
        out.labels.push_back(ds.labels[r]);
    }
    return out;
}

// An undefined F1 (no positive predictions on the fold) scores 0.
double f1_or_zero(std::span<const int> y_true, std::span<const int> y_pred) {
    const ClassReport report = class_report(confusion(y_true, y_pred));
    return report.class1.f1.value_or(0.0);
}

// Tree t's randomness depends only on (cell stream, t), never on n_trees, so
// combinations that differ only in n_trees share one fit: the k-tree model
// is exactly the first k trees of the largest one. Cells are therefore
// keyed by the tree-shape parameters.
struct CellGroup {
    ForestParams params;              // n_trees = largest requested
    std::string key;                  // shape parameters, labels the stream
    std::vector<std::size_t> members; // combo indices, in grid order
};

std::string shape_key(const ForestParams& p) {
    return (p.max_depth ? std::to_string(*p.max_depth) : std::string("unlimited")) +
           "/" + std::to_string(p.min_samples_split) + "/" +
           p.max_features.to_string() + "/" + (p.bootstrap ? "b1" : "b0");
}

std::vector<CellGroup> group_combos(const std::vector<ForestParams>& combos) {
    std::vector<CellGroup> groups;
    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
        const std::string key = shape_key(combos[ci]);
        CellGroup* group = nullptr;
        for (auto& g : groups)
            if (g.key == key) { group = &g; break; }
        if (!group) {
            groups.push_back({combos[ci], key, {}});
            group = &groups.back();
        }
        group->params.n_trees = std::max(group->params.n_trees, combos[ci].n_trees);
        group->members.push_back(ci);
    }
    return groups;
}

// Depth order for tie-breaks: unlimited counts as deepest.
std::size_t depth_rank(const std::optional<std::size_t>& d) {
    return d ? *d : std::numeric_limits<std::size_t>::max();
}

} // namespace

TuningResult grid_search(const Dataset& train, const ParamGrid& grid,
                         const SmoteConfig& smote_cfg, std::size_t k,
                         const RandomSource& rng, unsigned threads) {
    const auto combos = grid.combinations();
    const auto folds = stratified_kfold(train, k, rng.child("folds"));

    // Fold materialization is independent of the parameter combination, so
    // the resampled training folds are built once and shared.
    std::vector<Dataset> fit_sets(k);
    std::vector<Dataset> validation_sets(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<char> held_out(train.n_rows(), 0);
        for (std::size_t r : folds[f]) held_out[r] = 1;
        std::vector<std::size_t> fit_rows;
        fit_rows.reserve(train.n_rows() - folds[f].size());
        for (std::size_t r = 0; r < train.n_rows(); ++r)
            if (!held_out[r]) fit_rows.push_back(r);
        // Validation rows stay untouched; only the training folds are
        // resampled.
        auto [resampled, report] =
            smote(take_rows(train, fit_rows), smote_cfg, rng.child("fold", f));
        (void)report;
        fit_sets[f] = std::move(resampled);
        validation_sets[f] = take_rows(train, folds[f]);
    }

    TuningResult result;
    result.table.resize(combos.size());
    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
        result.table[ci].params = combos[ci];
        result.table[ci].fold_f1.assign(k, 0.0);
    }

    for (const CellGroup& group : group_combos(combos)) {
        // Vote-count cuts, ascending; a member's predictions come from the
        // first n_trees trees of the shared model.
        std::vector<std::size_t> cuts;
        for (std::size_t ci : group.members) cuts.push_back(combos[ci].n_trees);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        for (std::size_t f = 0; f < k; ++f) {
            const RandomSource cell_rng =
                rng.child("cell/" + group.key + "/fold", f);
            const ForestModel model =
                fit_forest(fit_sets[f], group.params, cell_rng, threads);
            const Dataset& validation = validation_sets[f];

            std::vector<std::vector<int>> predictions(
                cuts.size(), std::vector<int>(validation.n_rows()));
            parallel_for(validation.n_rows(), threads, [&](std::size_t r) {
                const auto row = validation.row(r);
                std::size_t votes = 0, tree = 0;
                for (std::size_t c = 0; c < cuts.size(); ++c) {
                    for (; tree < cuts[c]; ++tree)
                        votes += std::size_t(model.trees[tree].vote(row));
                    const double score = double(votes) / double(cuts[c]);
                    predictions[c][r] = score > 0.5 ? 1 : 0;
                }
            });

            for (std::size_t ci : group.members) {
                const std::size_t cut_index = std::size_t(
                    std::lower_bound(cuts.begin(), cuts.end(),
                                     combos[ci].n_trees) -
                    cuts.begin());
                result.table[ci].fold_f1[f] =
                    f1_or_zero(validation.labels, predictions[cut_index]);
            }
        }
    }

    std::size_t best_index = 0;
    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
        TuningCell& cell = result.table[ci];
        double sum = 0.0;
        for (const double f1 : cell.fold_f1) sum += f1;
        cell.mean_f1 = sum / double(k);

        const TuningCell& best = result.table[best_index];
        const bool better =
            cell.mean_f1 > best.mean_f1 ||
            (cell.mean_f1 == best.mean_f1 &&
             (cell.params.n_trees < best.params.n_trees ||
              (cell.params.n_trees == best.params.n_trees &&
               depth_rank(cell.params.max_depth) < depth_rank(best.params.max_depth))));
        if (better) best_index = ci;
    }

    result.best_params = result.table[best_index].params;
    result.best_score = result.table[best_index].mean_f1;
    return result;
}

} // namespace imbalforest
