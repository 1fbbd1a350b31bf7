#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "imbalforest/dataio.hpp"
#include "imbalforest/forest.hpp"
#include "imbalforest/resample.hpp"
#include "imbalforest/tune.hpp"

namespace imbalforest {

enum class RunMode { leakage_safe, paper_faithful };

std::string to_string(RunMode mode); // "safe" | "paper"
RunMode parse_mode(const std::string& s);

// One config type serves every subcommand; each command reads the fields it
// needs. Exactly one of input / synth identifies the data; exactly one of
// grid / params picks tuning vs fixed hyperparameters (a missing pair
// defaults to the stock grid).
struct RunConfig {
    std::optional<std::string> input;  // CSV path (raw for prepare,
                                       // processed for run/evaluate)
    std::optional<SynthSpec> synth;

    std::vector<std::string> drop{"DOMAIN", "STATE", "TOTAL_TRN_AMT"};
    std::optional<std::vector<std::string>> heatmap_features;
    std::optional<RawSchema> schema; // raw CSV layout; default Table-1 style

    double test_fraction = 0.3;
    SmoteConfig smote;
    std::optional<ParamGrid> grid;
    std::optional<ForestParams> params;
    std::size_t cv_folds = 5;

    std::uint64_t seed = 42;
    RunMode mode = RunMode::leakage_safe;
    double threshold = 0.5;

    std::optional<std::string> model; // evaluate: model file
    std::optional<std::string> data;  // evaluate: dataset file
};

// Parses and schema-validates a JSON config. Syntax errors carry line:col;
// semantic errors name the offending key and its line. `source_name`
// prefixes messages.
RunConfig load_config_text(const std::string& text,
                           const std::string& source_name);
RunConfig load_config_file(const std::filesystem::path& path);

// Canonical re-runnable form of the effective config. Excludes execution
// details (threads, output dir), so reports stay byte-identical across them.
nlohmann::ordered_json config_echo(const RunConfig& cfg);

struct RunOptions {
    unsigned threads = 1;
    bool no_timing = false; // canonical mode: omit timings from the report
};

// synth: generate + save <out>/processed.csv. Returns the file path.
std::filesystem::path cmd_synth(const RunConfig& cfg,
                                const std::filesystem::path& out_dir);

// prepare: ingest -> drop -> encode -> <out>/processed.csv, plus
// correlation CSV and heatmap SVG for the configured feature subset.
nlohmann::ordered_json cmd_prepare(const RunConfig& cfg,
                                   const std::filesystem::path& out_dir);

// run: the full pipeline. Leakage-safe: dedup -> split -> SMOTE(train) ->
// tune -> fit -> evaluate on the untouched test split. Paper-faithful:
// SMOTE(full) -> dedup -> split -> tune/fit/evaluate, watermarked.
// Writes report.json, roc.csv, roc.svg, confusion.svg, model.forest and
// tuning.csv (when tuned); returns the report.
nlohmann::ordered_json cmd_run(const RunConfig& cfg,
                               const std::filesystem::path& out_dir,
                               const RunOptions& options = {});

// evaluate: score a saved model on a dataset file at the configured
// threshold. Writes evaluation.json, roc.csv, roc.svg, confusion.svg.
nlohmann::ordered_json cmd_evaluate(const RunConfig& cfg,
                                    const std::filesystem::path& out_dir,
                                    const RunOptions& options = {});

} // namespace imbalforest
