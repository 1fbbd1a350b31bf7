#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "imbalforest/dataset.hpp"
#include "imbalforest/random.hpp"

namespace imbalforest {

enum class ColumnKind { categorical_text, numeric, label };

struct RawColumn {
    std::string name;
    ColumnKind kind;
};

// Ordered column layout of a raw transaction CSV. Exactly one label column;
// names unique.
struct RawSchema {
    std::vector<RawColumn> columns;

    void validate() const;
    std::size_t label_index() const;
};

// The 20-column transaction layout: DOMAIN, STATE (categorical), ZIP CODE,
// Time1, Time2, VIS1-2, XRN1-5, VAR1-5, TRN_AMT, TOTAL_TRN_AMT (numeric),
// TRN_TYPE (label).
RawSchema table1_schema();

// Column-typed raw data: numeric columns hold doubles, categorical and label
// columns hold text.
struct RawDataset {
    RawSchema schema;
    // One entry per schema column; alternative matches the column kind.
    std::vector<std::variant<std::vector<double>, std::vector<std::string>>>
        columns;
    std::size_t n_rows = 0;

    const std::vector<double>& numeric_column(std::size_t i) const {
        return std::get<std::vector<double>>(columns[i]);
    }
    const std::vector<std::string>& text_column(std::size_t i) const {
        return std::get<std::vector<std::string>>(columns[i]);
    }
};

// Parses a comma-separated UTF-8 file whose header must match the schema
// names in order. Numeric cells must parse to finite reals. Throws
// std::runtime_error naming the offending column / row on any mismatch.
RawDataset load_csv(const std::filesystem::path& path, const RawSchema& schema);

// Recipe for a synthetic imbalanced dataset: two class-conditional unit
// Gaussians whose means differ by class_separation in every coordinate.
struct SynthSpec {
    std::size_t n_rows = 0;
    double fraud_rate = 0.0;
    std::size_t n_features = 0;
    double class_separation = 0.0;
    // Adds a near-duplicate of the second-to-last column (noise sd 0.01).
    bool include_redundant_pair = false;

    void validate() const;
};

// Exactly round-half-up(n_rows * fraud_rate) rows labeled 1, placed at
// shuffled positions. Deterministic given (spec, rng).
Dataset generate_synthetic(const SynthSpec& spec, const RandomSource& rng);

// Processed dataset CSV: header "f:<name>,...,label", label column last,
// feature values written as shortest round-trippable decimals.
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

} // namespace imbalforest
