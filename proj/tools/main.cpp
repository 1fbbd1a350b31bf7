#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "imbalforest/pipeline.hpp"
#include "imbalforest/version.hpp"

namespace {

using imbalforest::RunConfig;
using imbalforest::RunOptions;

unsigned default_threads() {
    if (const char* env = std::getenv("IMBALFOREST_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
        std::cerr << "warning: ignoring invalid IMBALFOREST_THREADS='" << env
                  << "'\n";
    }
    return 1;
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    unsigned threads = default_threads();
    bool no_timing = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file");
    cmd->add_option("--seed", args.seed, "master seed (overrides the config)");
    cmd->add_option("--out", args.out_dir, "output directory")
        ->capture_default_str();
    cmd->add_option("--mode", args.mode, "pipeline mode (overrides the config)")
        ->check(CLI::IsMember({"safe", "paper"}));
    cmd->add_option("--threads", args.threads,
                    "worker threads (default: IMBALFOREST_THREADS or 1)");
    cmd->add_flag("--no-timing", args.no_timing,
                  "omit timings from the report (canonical output)");
}

RunConfig load_effective(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty())
        cfg = imbalforest::load_config_file(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (args.mode) cfg.mode = imbalforest::parse_mode(*args.mode);
    return cfg;
}

void print_metrics(const nlohmann::ordered_json& evaluation) {
    const auto& report = evaluation.at("report");
    const auto metric = [&](const char* cls, const char* name) {
        const auto& v = report.at(cls).at(name);
        return v.is_null() ? std::string("undefined") : v.dump();
    };
    std::cout << "  accuracy  " << report.at("accuracy").dump() << "\n"
              << "  fraud     precision " << metric("class1", "precision")
              << "  recall " << metric("class1", "recall") << "  f1 "
              << metric("class1", "f1") << "\n"
              << "  legit     precision " << metric("class0", "precision")
              << "  recall " << metric("class0", "recall") << "  f1 "
              << metric("class0", "f1") << "\n"
              << "  auc       " << evaluation.at("auc").dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"imbalforest: SMOTE + random-forest toolkit for imbalanced "
                 "binary classification"};
    app.set_version_flag("--version", imbalforest::kVersion);
    app.require_subcommand(1);

    CommonArgs synth_args, prepare_args, run_args, eval_args;

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    add_common(synth, synth_args);
    std::optional<std::uint64_t> synth_rows, synth_features;
    std::optional<double> synth_rate, synth_separation;
    bool synth_redundant = false;
    synth->add_option("--rows", synth_rows, "row count");
    synth->add_option("--fraud-rate", synth_rate, "fraud fraction in (0,1)");
    synth->add_option("--features", synth_features, "feature count");
    synth->add_option("--separation", synth_separation,
                      "class mean separation per coordinate");
    synth->add_flag("--redundant", synth_redundant,
                    "append a near-duplicate feature pair");

    auto* prepare = app.add_subcommand(
        "prepare", "ingest a raw CSV: drop columns, encode labels, heatmap");
    add_common(prepare, prepare_args);
    std::optional<std::string> prepare_input;
    prepare->add_option("--input", prepare_input, "raw CSV path (overrides config)");

    auto* run = app.add_subcommand(
        "run", "full pipeline: dedup, split, SMOTE, tune, fit, evaluate");
    add_common(run, run_args);
    std::optional<std::string> run_input;
    run->add_option("--input", run_input, "processed CSV path (overrides config)");

    auto* evaluate =
        app.add_subcommand("evaluate", "score a saved model on a dataset");
    add_common(evaluate, eval_args);
    std::optional<std::string> eval_model, eval_data;
    std::optional<double> eval_threshold;
    evaluate->add_option("--model", eval_model, "model file (overrides config)");
    evaluate->add_option("--data", eval_data, "dataset file (overrides config)");
    evaluate->add_option("--threshold", eval_threshold,
                         "decision threshold (overrides config)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            RunConfig cfg = load_effective(synth_args);
            if (!cfg.synth && (synth_rows || synth_rate || synth_features))
                cfg.synth = imbalforest::SynthSpec{};
            if (cfg.synth) {
                if (synth_rows) cfg.synth->n_rows = *synth_rows;
                if (synth_rate) cfg.synth->fraud_rate = *synth_rate;
                if (synth_features) cfg.synth->n_features = *synth_features;
                if (synth_separation) cfg.synth->class_separation = *synth_separation;
                if (synth_redundant) cfg.synth->include_redundant_pair = true;
            }
            const auto path = imbalforest::cmd_synth(cfg, synth_args.out_dir);
            std::cout << "wrote " << path.string() << "\n";
        } else if (prepare->parsed()) {
            RunConfig cfg = load_effective(prepare_args);
            if (prepare_input) {
                cfg.input = *prepare_input;
                cfg.synth.reset();
            }
            const auto summary = imbalforest::cmd_prepare(cfg, prepare_args.out_dir);
            std::cout << "prepared " << summary.at("rows") << " rows, "
                      << summary.at("features") << " features -> "
                      << summary.at("outputs").at("processed").get<std::string>()
                      << "\n";
            if (summary.contains("zero_variance_warning"))
                std::cout << "warning: zero-variance features "
                          << summary.at("zero_variance_warning").dump() << "\n";
        } else if (run->parsed()) {
            RunConfig cfg = load_effective(run_args);
            if (run_input) {
                cfg.input = *run_input;
                cfg.synth.reset();
            }
            const RunOptions options{run_args.threads, run_args.no_timing};
            const auto report = imbalforest::cmd_run(cfg, run_args.out_dir, options);
            std::cout << "mode " << report.at("mode").get<std::string>() << ", seed "
                      << report.at("seed") << "\n";
            if (report.contains("leakage_warning"))
                std::cout << "warning: "
                          << report.at("leakage_warning").get<std::string>() << "\n";
            if (report.contains("tuning"))
                std::cout << "best params "
                          << report.at("tuning").at("best_params").dump()
                          << " (mean f1 "
                          << report.at("tuning").at("best_mean_f1").dump() << ")\n";
            print_metrics(report.at("evaluation"));
            std::cout << "report: "
                      << (std::filesystem::path(run_args.out_dir) / "report.json")
                             .string()
                      << "\n";
        } else if (evaluate->parsed()) {
            RunConfig cfg = load_effective(eval_args);
            if (eval_model) cfg.model = *eval_model;
            if (eval_data) cfg.data = *eval_data;
            if (eval_threshold) cfg.threshold = *eval_threshold;
            const RunOptions options{eval_args.threads, eval_args.no_timing};
            const auto fragment =
                imbalforest::cmd_evaluate(cfg, eval_args.out_dir, options);
            std::cout << "evaluated " << fragment.at("rows") << " rows at threshold "
                      << fragment.at("threshold").dump() << "\n";
            print_metrics(fragment);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
