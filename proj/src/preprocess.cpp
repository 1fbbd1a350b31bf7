#include "imbalforest/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace imbalforest {

namespace {

void check_no_duplicates(const std::vector<std::string>& names,
                         const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second)
            throw std::invalid_argument(std::string("duplicate ") + what +
                                        " name '" + n + "'");
}

std::size_t round_half_up(double x) {
    return static_cast<std::size_t>(std::floor(x + 0.5));
}

// Bitwise row key: feature bytes followed by the label byte.
std::string row_key(const Dataset& ds, std::size_t r) {
    const auto row = ds.row(r);
    std::string key(row.size() * sizeof(double) + 1, '\0');
    std::memcpy(key.data(), row.data(), row.size() * sizeof(double));
    key.back() = static_cast<char>(ds.labels[r]);
    return key;
}

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

} // namespace

CorrMatrix pearson_corr(const Dataset& ds,
                        const std::vector<std::string>& feature_subset) {
    if (feature_subset.empty())
        throw std::invalid_argument("pearson_corr: empty feature subset");
    if (ds.n_rows() < 2)
        throw std::invalid_argument("pearson_corr: need at least 2 rows, got " +
                                    std::to_string(ds.n_rows()));
    check_no_duplicates(feature_subset, "feature");

    const std::size_t m = feature_subset.size();
    const std::size_t n = ds.n_rows();
    std::vector<std::size_t> cols(m);
    for (std::size_t i = 0; i < m; ++i)
        cols[i] = feature_index(ds, feature_subset[i]);

    std::vector<double> means(m, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t i = 0; i < m; ++i) means[i] += ds.at(r, cols[i]);
    for (double& mu : means) mu /= double(n);

    std::vector<double> variance(m, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t i = 0; i < m; ++i) {
            const double d = ds.at(r, cols[i]) - means[i];
            variance[i] += d * d;
        }

    CorrMatrix corr;
    corr.names = feature_subset;
    corr.values.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (variance[i] == 0.0) corr.zero_variance.push_back(feature_subset[i]);
        corr.values[i * m + i] = 1.0;
    }

    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            double value = 0.0;
            if (variance[i] != 0.0 && variance[j] != 0.0) {
                double cov = 0.0;
                for (std::size_t r = 0; r < n; ++r)
                    cov += (ds.at(r, cols[i]) - means[i]) *
                           (ds.at(r, cols[j]) - means[j]);
                value = cov / std::sqrt(variance[i] * variance[j]);
            }
            corr.values[i * m + j] = value;
            corr.values[j * m + i] = value;
        }
    return corr;
}

Dataset encode_labels(const RawDataset& raw, const std::vector<std::string>& drop) {
    raw.schema.validate();
    check_no_duplicates(drop, "drop");

    const std::size_t label_col = raw.schema.label_index();
    std::unordered_set<std::string> to_drop(drop.begin(), drop.end());
    for (const auto& name : drop) {
        bool found = false;
        for (const auto& col : raw.schema.columns)
            if (col.name == name) {
                if (col.kind == ColumnKind::label)
                    throw std::invalid_argument("cannot drop the label column '" +
                                                name + "'");
                found = true;
                break;
            }
        if (!found)
            throw std::invalid_argument("unknown column '" + name + "' in drop list");
    }

    Dataset ds;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < raw.schema.columns.size(); ++c) {
        const auto& col = raw.schema.columns[c];
        if (c == label_col || to_drop.count(col.name)) continue;
        if (col.kind == ColumnKind::categorical_text)
            throw std::invalid_argument("categorical column '" + col.name +
                                        "' must be dropped before encoding");
        feature_cols.push_back(c);
        ds.feature_names.push_back(col.name);
    }

    const auto& label_values = raw.text_column(label_col);
    ds.labels.reserve(raw.n_rows);
    for (std::size_t r = 0; r < raw.n_rows; ++r) {
        const auto& value = label_values[r];
        if (value == "LEGIT")
            ds.labels.push_back(0);
        else if (value == "FRAUD")
            ds.labels.push_back(1);
        else
            throw std::invalid_argument("unknown label value '" + value +
                                        "' at row " + std::to_string(r + 1) +
                                        " (expected LEGIT or FRAUD)");
    }

    ds.features.reserve(raw.n_rows * feature_cols.size());
    for (std::size_t r = 0; r < raw.n_rows; ++r)
        for (std::size_t c : feature_cols)
            ds.features.push_back(raw.numeric_column(c)[r]);
    return ds;
}

Dataset drop_features(const Dataset& ds, const std::vector<std::string>& names) {
    check_no_duplicates(names, "drop");
    std::unordered_set<std::size_t> gone;
    for (const auto& name : names) gone.insert(feature_index(ds, name));

    Dataset out;
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < ds.n_features(); ++c)
        if (!gone.count(c)) {
            kept.push_back(c);
            out.feature_names.push_back(ds.feature_names[c]);
        }
    out.labels = ds.labels;
    out.features.reserve(ds.n_rows() * kept.size());
    for (std::size_t r = 0; r < ds.n_rows(); ++r)
        for (std::size_t c : kept) out.features.push_back(ds.at(r, c));
    return out;
}

std::pair<Dataset, std::size_t> dedup(const Dataset& ds) {
    std::unordered_set<std::string> seen;
    seen.reserve(ds.n_rows() * 2);
    std::vector<std::size_t> kept;
    kept.reserve(ds.n_rows());
    for (std::size_t r = 0; r < ds.n_rows(); ++r)
        if (seen.insert(row_key(ds, r)).second) kept.push_back(r);
    const std::size_t removed = ds.n_rows() - kept.size();
    if (removed == 0) return {ds, 0};
    return {take_rows(ds, kept), removed};
}

SplitResult stratified_split(const Dataset& ds, double test_fraction,
                             const RandomSource& rng) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test_fraction must be in (0, 1), got " +
                                    std::to_string(test_fraction));
    const auto [n0, n1] = class_counts(ds);
    if (n0 < 2 || n1 < 2)
        throw std::invalid_argument("stratified_split: class " +
                                    std::string(n0 < 2 ? "0" : "1") +
                                    " has fewer than 2 rows");

    std::vector<char> in_test(ds.n_rows(), 0);
    for (int cls : {0, 1}) {
        std::vector<std::size_t> indices;
        for (std::size_t r = 0; r < ds.n_rows(); ++r)
            if (ds.labels[r] == cls) indices.push_back(r);
        auto stream = rng.child("split/class", std::uint64_t(cls)).stream();
        stream.shuffle(indices);
        const std::size_t n_test =
            round_half_up(double(indices.size()) * test_fraction);
        for (std::size_t i = 0; i < n_test; ++i) in_test[indices[i]] = 1;
    }

    SplitResult result;
    result.test_fraction = test_fraction;
    for (std::size_t r = 0; r < ds.n_rows(); ++r)
        (in_test[r] ? result.test_indices : result.train_indices).push_back(r);
    result.train = take_rows(ds, result.train_indices);
    result.test = take_rows(ds, result.test_indices);
    return result;
}

} // namespace imbalforest
