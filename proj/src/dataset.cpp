#include "imbalforest/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace imbalforest {

void check_dataset(const Dataset& ds) {
    if (ds.features.size() != ds.n_rows() * ds.n_features())
        throw std::invalid_argument("dataset shape mismatch: " +
                                    std::to_string(ds.features.size()) +
                                    " cells for " + std::to_string(ds.n_rows()) +
                                    " rows x " + std::to_string(ds.n_features()) +
                                    " features");
    for (double v : ds.features)
        if (!std::isfinite(v))
            throw std::invalid_argument("dataset contains a non-finite feature value");
    for (int label : ds.labels)
        if (label != 0 && label != 1)
            throw std::invalid_argument("invalid label " + std::to_string(label) +
                                        ": labels must be 0 or 1");
}

std::pair<std::size_t, std::size_t> class_counts(const Dataset& ds) {
    const auto ones = static_cast<std::size_t>(
        std::count(ds.labels.begin(), ds.labels.end(), 1));
    return {ds.labels.size() - ones, ones};
}

std::size_t feature_index(const Dataset& ds, const std::string& name) {
    const auto it =
        std::find(ds.feature_names.begin(), ds.feature_names.end(), name);
    if (it == ds.feature_names.end())
        throw std::invalid_argument("unknown feature name '" + name + "'");
    return static_cast<std::size_t>(it - ds.feature_names.begin());
}

} // namespace imbalforest
