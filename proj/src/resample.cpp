#include "imbalforest/resample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace imbalforest {

void SmoteConfig::validate() const {
    if (k < 1)
        throw std::invalid_argument("smote: k must be >= 1");
    if (!(target_ratio > 0.0 && target_ratio <= 1.0))
        throw std::invalid_argument("smote: target_ratio must be in (0, 1]");
}

std::vector<std::size_t> knn_indices(std::span<const double> points,
                                     std::size_t n_features,
                                     std::size_t query_index, std::size_t k) {
    if (n_features == 0 || points.size() % n_features != 0)
        throw std::invalid_argument("knn_indices: malformed points matrix");
    const std::size_t n = points.size() / n_features;
    if (query_index >= n)
        throw std::invalid_argument("knn_indices: query_index out of range");
    if (k >= n)
        throw std::invalid_argument("knn_indices: k (" + std::to_string(k) +
                                    ") must be below the row count (" +
                                    std::to_string(n) + ")");
    if (k == 0)
        throw std::invalid_argument("knn_indices: k must be >= 1");

    const double* q = points.data() + query_index * n_features;
    // Squared distances keep the (distance, index) ordering exact.
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(n - 1);
    for (std::size_t r = 0; r < n; ++r) {
        if (r == query_index) continue;
        const double* p = points.data() + r * n_features;
        double d2 = 0.0;
        for (std::size_t f = 0; f < n_features; ++f) {
            const double d = p[f] - q[f];
            d2 += d * d;
        }
        dist.emplace_back(d2, r);
    }
    std::partial_sort(dist.begin(), dist.begin() + std::ptrdiff_t(k), dist.end());

    std::vector<std::size_t> result(k);
    for (std::size_t i = 0; i < k; ++i) result[i] = dist[i].second;
    return result;
}

std::pair<Dataset, ResampleReport> smote(const Dataset& ds,
                                         const SmoteConfig& cfg,
                                         const RandomSource& rng) {
    cfg.validate();
    const auto [n0, n1] = class_counts(ds);
    if (n0 == 0 || n1 == 0)
        throw std::invalid_argument("smote: input has a single class");

    // Tie goes to fraud as minority; with equal counts no rows are added
    // either way.
    const int minority_label = n1 <= n0 ? 1 : 0;
    const std::size_t minority = std::min(n0, n1);
    const std::size_t majority = std::max(n0, n1);

    if (minority <= cfg.k)
        throw std::invalid_argument(
            "smote: minority count (" + std::to_string(minority) +
            ") must exceed k (" + std::to_string(cfg.k) +
            "); lower k or provide more minority rows");

    ResampleReport report;
    report.minority_label = minority_label;
    report.original_majority = majority;
    report.original_minority = minority;

    const std::size_t wanted = static_cast<std::size_t>(
        std::ceil(cfg.target_ratio * double(majority)));
    if (wanted <= minority) { // ratio already satisfied
        report.final_majority = majority;
        report.final_minority = minority;
        report.synthetic_rows_added = 0;
        return {ds, report};
    }
    const std::size_t n_syn = wanted - minority;

    const std::size_t nf = ds.n_features();
    std::vector<std::size_t> minority_rows;
    minority_rows.reserve(minority);
    for (std::size_t r = 0; r < ds.n_rows(); ++r)
        if (ds.labels[r] == minority_label) minority_rows.push_back(r);

    std::vector<double> minority_points(minority * nf);
    for (std::size_t i = 0; i < minority; ++i) {
        const auto row = ds.row(minority_rows[i]);
        std::copy(row.begin(), row.end(), minority_points.begin() + std::ptrdiff_t(i * nf));
    }

    // Neighbors are found among minority rows only.
    std::vector<std::size_t> neighbors(minority * cfg.k);
    for (std::size_t i = 0; i < minority; ++i) {
        const auto nn = knn_indices(minority_points, nf, i, cfg.k);
        std::copy(nn.begin(), nn.end(), neighbors.begin() + std::ptrdiff_t(i * cfg.k));
    }

    Dataset out = ds;
    out.features.reserve((ds.n_rows() + n_syn) * nf);
    out.labels.reserve(ds.n_rows() + n_syn);
    auto stream = rng.child("smote").stream();
    for (std::size_t s = 0; s < n_syn; ++s) {
        const std::size_t base = s % minority;
        const std::size_t pick = stream.next_below(cfg.k);
        const std::size_t other = neighbors[base * cfg.k + pick];
        const double u = stream.next_double();
        const double* x = minority_points.data() + base * nf;
        const double* z = minority_points.data() + other * nf;
        for (std::size_t f = 0; f < nf; ++f)
            out.features.push_back(x[f] + u * (z[f] - x[f]));
        out.labels.push_back(minority_label);
    }

    report.final_majority = majority;
    report.final_minority = wanted;
    report.synthetic_rows_added = n_syn;
    return {out, report};
}

} // namespace imbalforest
