#include "imbalforest/pipeline.hpp"

#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "imbalforest/eval.hpp"
#include "imbalforest/numio.hpp"
#include "imbalforest/preprocess.hpp"
#include "imbalforest/svg.hpp"
#include "imbalforest/version.hpp"

namespace imbalforest {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(RunMode mode) {
    return mode == RunMode::leakage_safe ? "safe" : "paper";
}

RunMode parse_mode(const std::string& s) {
    if (s == "safe") return RunMode::leakage_safe;
    if (s == "paper") return RunMode::paper_faithful;
    throw std::invalid_argument("invalid mode '" + s + "' (expected safe or paper)");
}

namespace {

constexpr const char* kPaperModeWarning =
    "paper-faithful mode: resampling precedes the train/test split, so "
    "evaluation rows include synthetic data (leakage)";
constexpr const char* kPaperModeBanner =
    "PAPER-FAITHFUL MODE: evaluated on resampled data";

// ---------------------------------------------------------------- config --

std::pair<std::size_t, std::size_t> line_col(const std::string& text,
                                             std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

// Best-effort line of a key's first occurrence, for semantic errors.
std::string key_location(const std::string& text, const std::string& key) {
    const std::size_t pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) return "";
    return " (line " + std::to_string(line_col(text, pos).first) + ")";
}

class ConfigReader {
public:
    ConfigReader(const std::string& text, const std::string& source)
        : text_(text), source_(source) {}

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw std::runtime_error(source_ + ": key '" + key + "': " + msg +
                                 key_location(text_, key));
    }

    void check_keys(const json& obj, const std::string& scope,
                    std::initializer_list<const char*> allowed) const {
        for (const auto& [key, value] : obj.items()) {
            (void)value;
            bool ok = false;
            for (const char* a : allowed)
                if (key == a) { ok = true; break; }
            if (!ok)
                throw std::runtime_error(source_ + ": unknown key '" + key + "'" +
                                         (scope.empty() ? "" : " in " + scope) +
                                         key_location(text_, key));
        }
    }

    double number(const json& obj, const std::string& key, double lo, double hi,
                  bool lo_open, bool hi_open) const {
        const auto& v = obj.at(key);
        if (!v.is_number()) fail(key, "expected a number");
        const double x = v.get<double>();
        const bool above = lo_open ? x > lo : x >= lo;
        const bool below = hi_open ? x < hi : x <= hi;
        if (!above || !below)
            fail(key, "value " + format_double(x) + " out of range " +
                          (lo_open ? "(" : "[") + format_double(lo) + ", " +
                          format_double(hi) + (hi_open ? ")" : "]"));
        return x;
    }

    std::uint64_t uint(const json& obj, const std::string& key,
                       std::uint64_t min_value = 0) const {
        const auto& v = obj.at(key);
        if (!v.is_number_unsigned())
            fail(key, "expected a nonnegative integer");
        const auto x = v.get<std::uint64_t>();
        if (x < min_value)
            fail(key, "must be >= " + std::to_string(min_value));
        return x;
    }

    std::string str(const json& obj, const std::string& key) const {
        const auto& v = obj.at(key);
        if (!v.is_string()) fail(key, "expected a string");
        return v.get<std::string>();
    }

    std::vector<std::string> str_list(const json& obj, const std::string& key) const {
        const auto& v = obj.at(key);
        if (!v.is_array()) fail(key, "expected an array of strings");
        std::vector<std::string> out;
        for (const auto& item : v) {
            if (!item.is_string()) fail(key, "expected an array of strings");
            out.push_back(item.get<std::string>());
        }
        return out;
    }

    MaxFeatures max_features_value(const json& v, const std::string& key) const {
        if (v.is_string()) {
            try {
                return MaxFeatures::parse(v.get<std::string>());
            } catch (const std::invalid_argument& e) {
                fail(key, e.what());
            }
        }
        if (v.is_number_unsigned() && v.get<std::uint64_t>() > 0)
            return MaxFeatures::exactly(v.get<std::size_t>());
        fail(key, "expected \"sqrt\", \"all\", or a positive integer");
    }

    std::optional<std::size_t> depth_value(const json& v, const std::string& key) const {
        if (v.is_null()) return std::nullopt;
        if (v.is_number_unsigned() && v.get<std::uint64_t>() > 0)
            return v.get<std::size_t>();
        fail(key, "expected a positive integer or null (unlimited)");
    }

private:
    const std::string& text_;
    std::string source_;
};

ColumnKind parse_kind(const std::string& s) {
    if (s == "categorical") return ColumnKind::categorical_text;
    if (s == "numeric") return ColumnKind::numeric;
    if (s == "label") return ColumnKind::label;
    throw std::invalid_argument("invalid column kind '" + s +
                                "' (expected categorical, numeric, or label)");
}

const char* kind_name(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::categorical_text: return "categorical";
        case ColumnKind::numeric: return "numeric";
        case ColumnKind::label: return "label";
    }
    return "numeric";
}

// -------------------------------------------------------- serialization --

ordered_json synth_json(const SynthSpec& spec) {
    return ordered_json{{"n_rows", spec.n_rows},
                        {"fraud_rate", spec.fraud_rate},
                        {"n_features", spec.n_features},
                        {"class_separation", spec.class_separation},
                        {"include_redundant_pair", spec.include_redundant_pair}};
}

ordered_json params_json(const ForestParams& p) {
    ordered_json j;
    j["n_trees"] = p.n_trees;
    if (p.max_depth)
        j["max_depth"] = *p.max_depth;
    else
        j["max_depth"] = nullptr;
    j["min_samples_split"] = p.min_samples_split;
    const MaxFeatures& mf = p.max_features;
    if (mf.mode == MaxFeatures::Mode::count)
        j["max_features"] = mf.count;
    else
        j["max_features"] = mf.to_string();
    j["bootstrap"] = p.bootstrap;
    return j;
}

ordered_json grid_json(const ParamGrid& g) {
    ordered_json j;
    j["n_trees"] = g.n_trees;
    auto depths = ordered_json::array();
    for (const auto& d : g.max_depth)
        depths.push_back(d ? ordered_json(*d) : ordered_json(nullptr));
    j["max_depth"] = std::move(depths);
    j["min_samples_split"] = g.min_samples_split;
    auto features = ordered_json::array();
    for (const auto& mf : g.max_features)
        features.push_back(mf.mode == MaxFeatures::Mode::count
                               ? ordered_json(mf.count)
                               : ordered_json(mf.to_string()));
    j["max_features"] = std::move(features);
    return j;
}

ordered_json metric_json(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json class_metrics_json(const ClassMetrics& m) {
    return ordered_json{{"precision", metric_json(m.precision)},
                        {"recall", metric_json(m.recall)},
                        {"f1", metric_json(m.f1)},
                        {"support", m.support}};
}

ordered_json report_json(const ClassReport& r) {
    return ordered_json{{"accuracy", r.accuracy},
                        {"class0", class_metrics_json(r.class0)},
                        {"class1", class_metrics_json(r.class1)}};
}

ordered_json confusion_json(const ConfusionMatrix& cm) {
    return ordered_json{{"tp", cm.tp}, {"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}};
}

ordered_json resample_json(const ResampleReport& r) {
    return ordered_json{
        {"minority_label", r.minority_label},
        {"original", ordered_json{{"majority", r.original_majority},
                                  {"minority", r.original_minority}}},
        {"final", ordered_json{{"majority", r.final_majority},
                               {"minority", r.final_minority}}},
        {"synthetic_rows_added", r.synthetic_rows_added}};
}

ordered_json tuning_json(const TuningResult& t, std::size_t folds) {
    ordered_json table = ordered_json::array();
    for (const auto& cell : t.table)
        table.push_back(ordered_json{{"params", params_json(cell.params)},
                                     {"mean_f1", cell.mean_f1},
                                     {"fold_f1", cell.fold_f1}});
    return ordered_json{{"folds", folds},
                        {"selection_metric", "f1_class1"},
                        {"defaults_note",
                         "grid contents, fold count, and selection metric are "
                         "toolkit defaults, configurable per run"},
                        {"best_params", params_json(t.best_params)},
                        {"best_mean_f1", t.best_score},
                        {"table", std::move(table)}};
}

// ------------------------------------------------------------- outputs --

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open file for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
    write_text(path, j.dump(2) + "\n");
}

std::string roc_csv(const RocCurve& curve) {
    std::ostringstream out;
    out << "threshold,fpr,tpr\n";
    for (std::size_t i = 0; i < curve.size(); ++i)
        out << format_double(curve.thresholds[i]) << ',' << format_double(curve.fpr[i])
            << ',' << format_double(curve.tpr[i]) << '\n';
    return out.str();
}

std::string corr_csv(const CorrMatrix& corr) {
    std::ostringstream out;
    for (const auto& name : corr.names) out << ',' << name;
    out << '\n';
    const std::size_t m = corr.names.size();
    for (std::size_t i = 0; i < m; ++i) {
        out << corr.names[i];
        for (std::size_t j = 0; j < m; ++j)
            out << ',' << format_double(corr.at(i, j));
        out << '\n';
    }
    return out.str();
}

std::string tuning_csv(const TuningResult& t) {
    std::ostringstream out;
    out << "combination,n_trees,max_depth,min_samples_split,max_features,fold,"
           "f1,mean_f1\n";
    for (std::size_t ci = 0; ci < t.table.size(); ++ci) {
        const auto& cell = t.table[ci];
        for (std::size_t f = 0; f < cell.fold_f1.size(); ++f) {
            out << ci << ',' << cell.params.n_trees << ','
                << (cell.params.max_depth ? std::to_string(*cell.params.max_depth)
                                          : std::string("unlimited"))
                << ',' << cell.params.min_samples_split << ','
                << cell.params.max_features.to_string() << ',' << f << ','
                << format_double(cell.fold_f1[f]) << ','
                << format_double(cell.mean_f1) << '\n';
        }
    }
    return out.str();
}

class StageTimer {
public:
    template <class Fn>
    auto time(const std::string& name, Fn&& fn) {
        const auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record(name, start);
        } else {
            auto result = fn();
            record(name, start);
            return result;
        }
    }

    ordered_json to_json() const {
        ordered_json j;
        double total = 0.0;
        for (const auto& [name, ms] : stages_) {
            j[name] = ms;
            total += ms;
        }
        j["total"] = total;
        return j;
    }

private:
    void record(const std::string& name,
                std::chrono::steady_clock::time_point start) {
        const auto end = std::chrono::steady_clock::now();
        stages_.emplace_back(
            name, std::chrono::duration<double, std::milli>(end - start).count());
    }

    std::vector<std::pair<std::string, double>> stages_;
};

Dataset load_input(const RunConfig& cfg) {
    if (cfg.synth)
        return generate_synthetic(*cfg.synth, RandomSource(cfg.seed));
    if (cfg.input) return load_dataset(*cfg.input);
    throw std::runtime_error("config must set one of 'input' and 'synth'");
}

void check_threshold(double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw std::runtime_error("threshold must be in [0, 1], got " +
                                 format_double(threshold));
}

void require_out_dir(const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
}

ordered_json dataset_stats(const Dataset& ds, const RunConfig& cfg,
                           std::size_t duplicates_removed) {
    const auto [n0, n1] = class_counts(ds);
    const std::size_t minority = std::min(n0, n1);
    const std::size_t majority = std::max(n0, n1);
    return ordered_json{
        {"source", cfg.synth ? std::string("synth") : *cfg.input},
        {"rows", ds.n_rows()},
        {"features", ds.n_features()},
        {"class_counts", ordered_json{{"legit", n0}, {"fraud", n1}}},
        {"fraud_fraction", ds.n_rows() ? double(n1) / double(ds.n_rows()) : 0.0},
        {"imbalance_ratio",
         majority ? double(minority) / double(majority) : 0.0},
        {"duplicates_removed", duplicates_removed}};
}

} // namespace

RunConfig load_config_text(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte ? e.byte - 1 : 0);
        std::string what = e.what();
        const std::size_t cut = what.find("] ");
        if (cut != std::string::npos) what = what.substr(cut + 2);
        throw std::runtime_error(source + ":" + std::to_string(line) + ":" +
                                 std::to_string(col) + ": syntax error: " + what);
    }
    if (!j.is_object())
        throw std::runtime_error(source + ": config must be a JSON object");

    ConfigReader reader(text, source);
    reader.check_keys(j, "",
                      {"input", "synth", "drop", "heatmap_features", "schema",
                       "test_fraction", "smote", "grid", "params", "cv_folds",
                       "seed", "mode", "threshold", "model", "data"});

    RunConfig cfg;
    if (j.contains("input")) cfg.input = reader.str(j, "input");
    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        if (!s.is_object()) reader.fail("synth", "expected an object");
        reader.check_keys(s, "'synth'",
                          {"n_rows", "fraud_rate", "n_features",
                           "class_separation", "include_redundant_pair"});
        SynthSpec spec;
        spec.n_rows = reader.uint(s, "n_rows", 1);
        spec.fraud_rate = reader.number(s, "fraud_rate", 0.0, 1.0, true, true);
        spec.n_features = reader.uint(s, "n_features", 1);
        spec.class_separation =
            s.contains("class_separation")
                ? reader.number(s, "class_separation", 0.0, 1e12, false, false)
                : 0.0;
        if (s.contains("include_redundant_pair")) {
            if (!s.at("include_redundant_pair").is_boolean())
                reader.fail("include_redundant_pair", "expected a boolean");
            spec.include_redundant_pair = s.at("include_redundant_pair").get<bool>();
        }
        cfg.synth = spec;
    }
    if (cfg.input && cfg.synth)
        throw std::runtime_error(source +
                                 ": config must set exactly one of 'input' and 'synth'");

    if (j.contains("drop")) cfg.drop = reader.str_list(j, "drop");
    if (j.contains("heatmap_features"))
        cfg.heatmap_features = reader.str_list(j, "heatmap_features");
    if (j.contains("schema")) {
        const auto& arr = j.at("schema");
        if (!arr.is_array()) reader.fail("schema", "expected an array of columns");
        RawSchema schema;
        for (const auto& col : arr) {
            if (!col.is_object() || !col.contains("name") || !col.contains("kind"))
                reader.fail("schema", "each column needs 'name' and 'kind'");
            try {
                schema.columns.push_back({col.at("name").get<std::string>(),
                                          parse_kind(col.at("kind").get<std::string>())});
            } catch (const std::invalid_argument& e) {
                reader.fail("schema", e.what());
            }
        }
        try {
            schema.validate();
        } catch (const std::invalid_argument& e) {
            reader.fail("schema", e.what());
        }
        cfg.schema = std::move(schema);
    }

    if (j.contains("test_fraction"))
        cfg.test_fraction = reader.number(j, "test_fraction", 0.0, 1.0, true, true);
    if (j.contains("smote")) {
        const auto& s = j.at("smote");
        if (!s.is_object()) reader.fail("smote", "expected an object");
        reader.check_keys(s, "'smote'", {"k", "target_ratio"});
        if (s.contains("k")) cfg.smote.k = reader.uint(s, "k", 1);
        if (s.contains("target_ratio"))
            cfg.smote.target_ratio =
                reader.number(s, "target_ratio", 0.0, 1.0, true, false);
    }

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (!g.is_object()) reader.fail("grid", "expected an object");
        reader.check_keys(g, "'grid'",
                          {"n_trees", "max_depth", "min_samples_split",
                           "max_features"});
        ParamGrid grid;
        if (g.contains("n_trees")) {
            grid.n_trees.clear();
            for (const auto& v : g.at("n_trees")) {
                if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0)
                    reader.fail("n_trees", "expected positive integers");
                grid.n_trees.push_back(v.get<std::size_t>());
            }
        }
        if (g.contains("max_depth")) {
            grid.max_depth.clear();
            for (const auto& v : g.at("max_depth"))
                grid.max_depth.push_back(reader.depth_value(v, "max_depth"));
        }
        if (g.contains("min_samples_split")) {
            grid.min_samples_split.clear();
            for (const auto& v : g.at("min_samples_split")) {
                if (!v.is_number_unsigned() || v.get<std::uint64_t>() < 2)
                    reader.fail("min_samples_split", "expected integers >= 2");
                grid.min_samples_split.push_back(v.get<std::size_t>());
            }
        }
        if (g.contains("max_features")) {
            grid.max_features.clear();
            for (const auto& v : g.at("max_features"))
                grid.max_features.push_back(
                    reader.max_features_value(v, "max_features"));
        }
        try {
            grid.validate();
        } catch (const std::invalid_argument& e) {
            reader.fail("grid", e.what());
        }
        cfg.grid = std::move(grid);
    }

    if (j.contains("params")) {
        const auto& p = j.at("params");
        if (!p.is_object()) reader.fail("params", "expected an object");
        reader.check_keys(p, "'params'",
                          {"n_trees", "max_depth", "min_samples_split",
                           "max_features", "bootstrap"});
        ForestParams params;
        if (p.contains("n_trees")) params.n_trees = reader.uint(p, "n_trees", 1);
        if (p.contains("max_depth"))
            params.max_depth = reader.depth_value(p.at("max_depth"), "max_depth");
        if (p.contains("min_samples_split"))
            params.min_samples_split = reader.uint(p, "min_samples_split", 2);
        if (p.contains("max_features"))
            params.max_features =
                reader.max_features_value(p.at("max_features"), "max_features");
        if (p.contains("bootstrap")) {
            if (!p.at("bootstrap").is_boolean())
                reader.fail("bootstrap", "expected a boolean");
            params.bootstrap = p.at("bootstrap").get<bool>();
        }
        cfg.params = params;
    }
    if (cfg.grid && cfg.params)
        throw std::runtime_error(
            source + ": config must set at most one of 'grid' and 'params'");

    if (j.contains("cv_folds")) cfg.cv_folds = reader.uint(j, "cv_folds", 2);
    if (j.contains("seed")) cfg.seed = reader.uint(j, "seed");
    if (j.contains("mode")) {
        try {
            cfg.mode = parse_mode(reader.str(j, "mode"));
        } catch (const std::invalid_argument& e) {
            reader.fail("mode", e.what());
        }
    }
    if (j.contains("threshold"))
        cfg.threshold = reader.number(j, "threshold", 0.0, 1.0, false, false);
    if (j.contains("model")) cfg.model = reader.str(j, "model");
    if (j.contains("data")) cfg.data = reader.str(j, "data");
    return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return load_config_text(buf.str(), path.filename().string());
}

nlohmann::ordered_json config_echo(const RunConfig& cfg) {
    ordered_json echo;
    if (cfg.input) echo["input"] = *cfg.input;
    if (cfg.synth) echo["synth"] = synth_json(*cfg.synth);
    echo["drop"] = cfg.drop;
    if (cfg.heatmap_features) echo["heatmap_features"] = *cfg.heatmap_features;
    if (cfg.schema) {
        auto cols = ordered_json::array();
        for (const auto& col : cfg.schema->columns)
            cols.push_back(ordered_json{{"name", col.name},
                                        {"kind", kind_name(col.kind)}});
        echo["schema"] = std::move(cols);
    }
    echo["test_fraction"] = cfg.test_fraction;
    echo["smote"] =
        ordered_json{{"k", cfg.smote.k}, {"target_ratio", cfg.smote.target_ratio}};
    if (cfg.grid) echo["grid"] = grid_json(*cfg.grid);
    if (cfg.params) echo["params"] = params_json(*cfg.params);
    echo["cv_folds"] = cfg.cv_folds;
    echo["seed"] = cfg.seed;
    echo["mode"] = to_string(cfg.mode);
    echo["threshold"] = cfg.threshold;
    if (cfg.model) echo["model"] = *cfg.model;
    if (cfg.data) echo["data"] = *cfg.data;
    return echo;
}

std::filesystem::path cmd_synth(const RunConfig& cfg,
                                const std::filesystem::path& out_dir) {
    if (!cfg.synth)
        throw std::runtime_error("synth requires a 'synth' spec in the config");
    require_out_dir(out_dir);
    const Dataset ds = generate_synthetic(*cfg.synth, RandomSource(cfg.seed));
    const auto path = out_dir / "processed.csv";
    save_dataset(ds, path);
    return path;
}

nlohmann::ordered_json cmd_prepare(const RunConfig& cfg,
                                   const std::filesystem::path& out_dir) {
    require_out_dir(out_dir);

    Dataset processed;     // post-drop, what gets written
    Dataset investigation; // pre-drop numeric view used for the heatmap
    if (cfg.synth) {
        processed = generate_synthetic(*cfg.synth, RandomSource(cfg.seed));
        investigation = processed;
    } else if (cfg.input) {
        const RawSchema schema = cfg.schema ? *cfg.schema : table1_schema();
        const RawDataset raw = load_csv(*cfg.input, schema);
        std::vector<std::string> categorical;
        for (const auto& col : schema.columns)
            if (col.kind == ColumnKind::categorical_text)
                categorical.push_back(col.name);
        investigation = encode_labels(raw, categorical);
        processed = encode_labels(raw, cfg.drop);
    } else {
        throw std::runtime_error("prepare requires one of 'input' and 'synth'");
    }

    // Default investigated subset mirrors the redundant time / amount pairs;
    // anything configured wins, anything missing falls back to all features.
    std::vector<std::string> subset;
    if (cfg.heatmap_features) {
        subset = *cfg.heatmap_features;
    } else {
        for (const char* name : {"Time1", "Time2", "TRN_AMT", "TOTAL_TRN_AMT"})
            for (const auto& have : investigation.feature_names)
                if (have == name) subset.push_back(name);
        if (subset.empty()) subset = investigation.feature_names;
    }

    const CorrMatrix corr = pearson_corr(investigation, subset);
    write_text(out_dir / "corr.csv", corr_csv(corr));
    write_text(out_dir / "heatmap.svg", heatmap_svg(corr));
    save_dataset(processed, out_dir / "processed.csv");

    const auto [n0, n1] = class_counts(processed);
    ordered_json summary{
        {"rows", processed.n_rows()},
        {"features", processed.n_features()},
        {"feature_names", processed.feature_names},
        {"class_counts", ordered_json{{"legit", n0}, {"fraud", n1}}},
        {"correlated", ordered_json{{"names", corr.names}}},
        {"outputs", ordered_json{{"processed", (out_dir / "processed.csv").string()},
                                 {"corr", (out_dir / "corr.csv").string()},
                                 {"heatmap", (out_dir / "heatmap.svg").string()}}}};
    if (!corr.zero_variance.empty())
        summary["zero_variance_warning"] = corr.zero_variance;
    return summary;
}

nlohmann::ordered_json cmd_run(const RunConfig& cfg,
                               const std::filesystem::path& out_dir,
                               const RunOptions& options) {
    require_out_dir(out_dir);
    check_threshold(cfg.threshold);

    RunConfig effective = cfg;
    if (!effective.grid && !effective.params) effective.grid = ParamGrid{};
    const bool paper = effective.mode == RunMode::paper_faithful;
    const RandomSource root(effective.seed);
    StageTimer timer;

    const Dataset input =
        timer.time("load", [&] { return load_input(effective); });

    Dataset deduped;
    std::size_t duplicates_removed = 0;
    SplitResult split;
    ResampleReport resample_report;
    Dataset fit_data; // what the final model trains on

    if (!paper) {
        std::tie(deduped, duplicates_removed) =
            timer.time("dedup", [&] { return dedup(input); });
        split = timer.time("split", [&] {
            return stratified_split(deduped, effective.test_fraction, root);
        });
        std::tie(fit_data, resample_report) = timer.time("smote", [&] {
            return smote(split.train, effective.smote, root);
        });
    } else {
        Dataset resampled;
        std::tie(resampled, resample_report) = timer.time(
            "smote", [&] { return smote(input, effective.smote, root); });
        std::tie(deduped, duplicates_removed) =
            timer.time("dedup", [&] { return dedup(resampled); });
        split = timer.time("split", [&] {
            return stratified_split(deduped, effective.test_fraction, root);
        });
        fit_data = split.train;
    }

    std::optional<TuningResult> tuning;
    ForestParams params;
    if (effective.grid) {
        tuning = timer.time("tune", [&] {
            return grid_search(split.train, *effective.grid, effective.smote,
                               effective.cv_folds, root.child("tune"),
                               options.threads);
        });
        params = tuning->best_params;
    } else {
        params = *effective.params;
    }

    const ForestModel model = timer.time("fit", [&] {
        return fit_forest(fit_data, params, root.child("fit"), options.threads);
    });

    std::vector<double> scores;
    std::vector<int> predictions;
    timer.time("evaluate", [&] {
        scores = predict_scores(model, split.test, options.threads);
        predictions.resize(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i)
            predictions[i] = scores[i] > effective.threshold ? 1 : 0;
    });
    const ConfusionMatrix cm = confusion(split.test.labels, predictions);
    const ClassReport report = class_report(cm);
    const RocCurve curve = roc_curve(split.test.labels, scores);

    timer.time("write_outputs", [&] {
        save_model(model, out_dir / "model.forest");
        write_text(out_dir / "roc.csv", roc_csv(curve));
        write_text(out_dir / "roc.svg",
                   roc_svg(curve, paper ? kPaperModeBanner : ""));
        write_text(out_dir / "confusion.svg",
                   confusion_svg(cm, paper ? kPaperModeBanner : ""));
        if (tuning) write_text(out_dir / "tuning.csv", tuning_csv(*tuning));
    });

    ordered_json out;
    out["toolkit"] = ordered_json{{"name", "imbalforest"}, {"version", kVersion}};
    out["mode"] = to_string(effective.mode);
    out["seed"] = effective.seed;
    if (paper) out["leakage_warning"] = kPaperModeWarning;
    out["config"] = config_echo(effective);
    out["dataset"] = dataset_stats(input, effective, duplicates_removed);
    out["resample"] = resample_json(resample_report);
    if (tuning) out["tuning"] = tuning_json(*tuning, effective.cv_folds);
    out["model"] = ordered_json{{"params", params_json(params)},
                                {"train_seed", model.train_seed},
                                {"file", "model.forest"}};
    out["evaluation"] =
        ordered_json{{"threshold", effective.threshold},
                     {"test_rows", split.test.n_rows()},
                     {"confusion", confusion_json(cm)},
                     {"report", report_json(report)},
                     {"auc", curve.auc}};

    if (!paper) {
        // Row-identity audit: the test split must be a byte-exact slice of
        // the deduped input, disjoint from the training indices.
        std::size_t overlap = 0;
        {
            std::vector<char> in_train(deduped.n_rows(), 0);
            for (std::size_t r : split.train_indices) in_train[r] = 1;
            for (std::size_t r : split.test_indices) overlap += in_train[r];
        }
        bool identical = split.test_indices.size() == split.test.n_rows();
        for (std::size_t i = 0; identical && i < split.test_indices.size(); ++i) {
            const auto a = split.test.row(i);
            const auto b = deduped.row(split.test_indices[i]);
            identical = std::memcmp(a.data(), b.data(),
                                    a.size() * sizeof(double)) == 0 &&
                        split.test.labels[i] == deduped.labels[split.test_indices[i]];
        }
        out["leakage_audit"] =
            ordered_json{{"train_rows", split.train.n_rows()},
                         {"test_rows", split.test.n_rows()},
                         {"index_overlap", overlap},
                         {"test_rows_bit_identical", identical},
                         {"verified", overlap == 0 && identical}};
    }
    if (!options.no_timing) out["timings_ms"] = timer.to_json();

    write_json(out_dir / "report.json", out);
    return out;
}

nlohmann::ordered_json cmd_evaluate(const RunConfig& cfg,
                                    const std::filesystem::path& out_dir,
                                    const RunOptions& options) {
    if (!cfg.model || !cfg.data)
        throw std::runtime_error("evaluate requires 'model' and 'data' paths");
    check_threshold(cfg.threshold);
    require_out_dir(out_dir);

    const ForestModel model = load_model(*cfg.model);
    const Dataset ds = load_dataset(*cfg.data);

    if (model.feature_names.size() != ds.n_features())
        throw std::runtime_error(
            "feature-count mismatch: model expects " +
            std::to_string(model.feature_names.size()) + " features, dataset has " +
            std::to_string(ds.n_features()));
    for (std::size_t i = 0; i < ds.n_features(); ++i)
        if (model.feature_names[i] != ds.feature_names[i])
            throw std::runtime_error("feature-name mismatch at column " +
                                     std::to_string(i + 1) + ": model '" +
                                     model.feature_names[i] + "' vs dataset '" +
                                     ds.feature_names[i] + "'");

    const auto scores = predict_scores(model, ds, options.threads);
    std::vector<int> predictions(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        predictions[i] = scores[i] > cfg.threshold ? 1 : 0;

    const ConfusionMatrix cm = confusion(ds.labels, predictions);
    const ClassReport report = class_report(cm);
    const RocCurve curve = roc_curve(ds.labels, scores);

    write_text(out_dir / "roc.csv", roc_csv(curve));
    write_text(out_dir / "roc.svg", roc_svg(curve));
    write_text(out_dir / "confusion.svg", confusion_svg(cm));

    ordered_json out{{"toolkit", ordered_json{{"name", "imbalforest"},
                                              {"version", kVersion}}},
                     {"model", *cfg.model},
                     {"data", *cfg.data},
                     {"rows", ds.n_rows()},
                     {"threshold", cfg.threshold},
                     {"confusion", confusion_json(cm)},
                     {"report", report_json(report)},
                     {"auc", curve.auc}};
    write_json(out_dir / "evaluation.json", out);
    return out;
}

} // namespace imbalforest
