#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "imbalforest/dataio.hpp"
#include "imbalforest/eval.hpp"
#include "imbalforest/forest.hpp"
#include "imbalforest/pipeline.hpp"
#include "imbalforest/preprocess.hpp"
#include "imbalforest/resample.hpp"
#include "imbalforest/tune.hpp"
#include "imbalforest/version.hpp"

namespace py = pybind11;
using namespace imbalforest;

namespace {

Dataset dataset_from_arrays(std::vector<std::string> names,
                            py::array_t<double, py::array::c_style | py::array::forcecast> features,
                            py::array_t<long, py::array::c_style | py::array::forcecast> labels) {
    if (features.ndim() != 2)
        throw py::value_error("features must be a 2-D array");
    if (labels.ndim() != 1)
        throw py::value_error("labels must be a 1-D array");
    const auto n = static_cast<std::size_t>(features.shape(0));
    const auto p = static_cast<std::size_t>(features.shape(1));
    if (static_cast<std::size_t>(labels.shape(0)) != n)
        throw py::value_error("labels length must match the feature row count");
    if (names.size() != p)
        throw py::value_error("feature_names length must match the column count");

    Dataset ds;
    ds.feature_names = std::move(names);
    ds.features.assign(features.data(), features.data() + n * p);
    ds.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        ds.labels.push_back(static_cast<int>(labels.data()[i]));
    check_dataset(ds);
    return ds;
}

py::array_t<double> features_array(const Dataset& ds) {
    py::array_t<double> out({ds.n_rows(), ds.n_features()});
    std::memcpy(out.mutable_data(), ds.features.data(),
                ds.features.size() * sizeof(double));
    return out;
}

py::array_t<long> labels_array(const Dataset& ds) {
    py::array_t<long> out(ds.n_rows());
    for (std::size_t i = 0; i < ds.n_rows(); ++i)
        out.mutable_data()[i] = ds.labels[i];
    return out;
}

std::vector<int> labels_from_array(
    py::array_t<long, py::array::c_style | py::array::forcecast> y) {
    std::vector<int> out(static_cast<std::size_t>(y.shape(0)));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<int>(y.data()[i]);
    return out;
}

py::dict confusion_dict(const ConfusionMatrix& cm) {
    py::dict d;
    d["tp"] = cm.tp;
    d["tn"] = cm.tn;
    d["fp"] = cm.fp;
    d["fn"] = cm.fn;
    return d;
}

py::object metric_obj(const std::optional<double>& v) {
    return v ? py::cast(*v) : py::none();
}

py::dict class_metrics_dict(const ClassMetrics& m) {
    py::dict d;
    d["precision"] = metric_obj(m.precision);
    d["recall"] = metric_obj(m.recall);
    d["f1"] = metric_obj(m.f1);
    d["support"] = m.support;
    return d;
}

py::dict report_dict(const ClassReport& r) {
    py::dict d;
    d["accuracy"] = r.accuracy;
    d["class0"] = class_metrics_dict(r.class0);
    d["class1"] = class_metrics_dict(r.class1);
    return d;
}

ForestParams params_from_kwargs(std::size_t n_trees,
                                std::optional<std::size_t> max_depth,
                                std::size_t min_samples_split,
                                const std::string& max_features, bool bootstrap) {
    ForestParams params;
    params.n_trees = n_trees;
    params.max_depth = max_depth;
    params.min_samples_split = min_samples_split;
    params.max_features = MaxFeatures::parse(max_features);
    params.bootstrap = bootstrap;
    return params;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "imbalforest: SMOTE + random-forest toolkit for imbalanced "
              "binary classification";
    m.attr("__version__") = kVersion;

    py::class_<RandomSource>(m, "RandomSource")
        .def(py::init<std::uint64_t, std::string>(), py::arg("seed"),
             py::arg("label") = "")
        .def("child",
             [](const RandomSource& rs, const std::string& name) {
                 return rs.child(name);
             },
             py::arg("name"))
        .def_property_readonly("seed", &RandomSource::seed)
        .def_property_readonly("stream_label", &RandomSource::stream_label);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init(&dataset_from_arrays), py::arg("feature_names"),
             py::arg("features"), py::arg("labels"))
        .def_property_readonly("feature_names",
                               [](const Dataset& ds) { return ds.feature_names; })
        .def_property_readonly("features", &features_array)
        .def_property_readonly("labels", &labels_array)
        .def_property_readonly("n_rows", &Dataset::n_rows)
        .def_property_readonly("n_features", &Dataset::n_features)
        .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; },
             py::is_operator())
        .def("__repr__", [](const Dataset& ds) {
            return "<Dataset rows=" + std::to_string(ds.n_rows()) +
                   " features=" + std::to_string(ds.n_features()) + ">";
        });

    py::class_<ForestModel>(m, "ForestModel")
        .def_property_readonly("n_trees",
                               [](const ForestModel& f) { return f.trees.size(); })
        .def_property_readonly("feature_names",
                               [](const ForestModel& f) { return f.feature_names; })
        .def_property_readonly("train_seed",
                               [](const ForestModel& f) { return f.train_seed; })
        .def("__eq__",
             [](const ForestModel& a, const ForestModel& b) { return a == b; },
             py::is_operator());

    m.def("generate_synthetic",
          [](std::size_t n_rows, double fraud_rate, std::size_t n_features,
             double class_separation, bool include_redundant_pair,
             const RandomSource& rng) {
              SynthSpec spec{n_rows, fraud_rate, n_features, class_separation,
                             include_redundant_pair};
              return generate_synthetic(spec, rng);
          },
          py::arg("n_rows"), py::arg("fraud_rate"), py::arg("n_features"),
          py::arg("class_separation") = 0.0,
          py::arg("include_redundant_pair") = false, py::arg("rng"));

    m.def("save_dataset",
          [](const Dataset& ds, const std::string& path) {
              save_dataset(ds, path);
          },
          py::arg("dataset"), py::arg("path"));
    m.def("load_dataset",
          [](const std::string& path) { return load_dataset(path); },
          py::arg("path"));

    m.def("pearson_corr",
          [](const Dataset& ds, const std::vector<std::string>& features) {
              const CorrMatrix corr = pearson_corr(ds, features);
              const std::size_t n = corr.names.size();
              py::array_t<double> values({n, n});
              std::memcpy(values.mutable_data(), corr.values.data(),
                          corr.values.size() * sizeof(double));
              py::dict d;
              d["names"] = corr.names;
              d["values"] = values;
              d["zero_variance"] = corr.zero_variance;
              return d;
          },
          py::arg("dataset"), py::arg("features"));

    m.def("dedup",
          [](const Dataset& ds) {
              auto [out, removed] = dedup(ds);
              return py::make_tuple(out, removed);
          },
          py::arg("dataset"));

    m.def("stratified_split",
          [](const Dataset& ds, double test_fraction, const RandomSource& rng) {
              SplitResult split = stratified_split(ds, test_fraction, rng);
              return py::make_tuple(std::move(split.train), std::move(split.test));
          },
          py::arg("dataset"), py::arg("test_fraction"), py::arg("rng"));

    m.def("smote",
          [](const Dataset& ds, const RandomSource& rng, std::size_t k,
             double target_ratio) {
              auto [out, report] = smote(ds, SmoteConfig{k, target_ratio}, rng);
              py::dict r;
              r["minority_label"] = report.minority_label;
              r["original_majority"] = report.original_majority;
              r["original_minority"] = report.original_minority;
              r["final_majority"] = report.final_majority;
              r["final_minority"] = report.final_minority;
              r["synthetic_rows_added"] = report.synthetic_rows_added;
              return py::make_tuple(std::move(out), r);
          },
          py::arg("dataset"), py::arg("rng"), py::arg("k") = 5,
          py::arg("target_ratio") = 1.0);

    m.def("fit_forest",
          [](const Dataset& train, const RandomSource& rng, std::size_t n_trees,
             std::optional<std::size_t> max_depth, std::size_t min_samples_split,
             const std::string& max_features, bool bootstrap, unsigned threads) {
              return fit_forest(train,
                                params_from_kwargs(n_trees, max_depth,
                                                   min_samples_split, max_features,
                                                   bootstrap),
                                rng, threads);
          },
          py::arg("train"), py::arg("rng"), py::arg("n_trees") = 100,
          py::arg("max_depth") = py::none(), py::arg("min_samples_split") = 2,
          py::arg("max_features") = "sqrt", py::arg("bootstrap") = true,
          py::arg("threads") = 1);

    m.def("predict_scores",
          [](const ForestModel& model, const Dataset& ds, unsigned threads) {
              const auto scores = predict_scores(model, ds, threads);
              py::array_t<double> out(scores.size());
              std::memcpy(out.mutable_data(), scores.data(),
                          scores.size() * sizeof(double));
              return out;
          },
          py::arg("model"), py::arg("dataset"), py::arg("threads") = 1);

    m.def("predict_labels",
          [](const ForestModel& model, const Dataset& ds, double threshold,
             unsigned threads) {
              const auto labels = predict_labels(model, ds, threshold, threads);
              py::array_t<long> out(labels.size());
              for (std::size_t i = 0; i < labels.size(); ++i)
                  out.mutable_data()[i] = labels[i];
              return out;
          },
          py::arg("model"), py::arg("dataset"), py::arg("threshold") = 0.5,
          py::arg("threads") = 1);

    m.def("save_model",
          [](const ForestModel& model, const std::string& path) {
              save_model(model, path);
          },
          py::arg("model"), py::arg("path"));
    m.def("load_model",
          [](const std::string& path) { return load_model(path); },
          py::arg("path"));

    m.def("metrics",
          [](py::array_t<long, py::array::c_style | py::array::forcecast> y_true,
             py::array_t<long, py::array::c_style | py::array::forcecast> y_pred) {
              const auto t = labels_from_array(y_true);
              const auto p = labels_from_array(y_pred);
              const ConfusionMatrix cm = confusion(t, p);
              py::dict d;
              d["confusion"] = confusion_dict(cm);
              d["report"] = report_dict(class_report(cm));
              return d;
          },
          py::arg("y_true"), py::arg("y_pred"));

    m.def("roc",
          [](py::array_t<long, py::array::c_style | py::array::forcecast> y_true,
             py::array_t<double, py::array::c_style | py::array::forcecast> scores) {
              const auto t = labels_from_array(y_true);
              std::vector<double> s(scores.data(),
                                    scores.data() + scores.shape(0));
              const RocCurve curve = roc_curve(t, s);
              py::dict d;
              d["fpr"] = curve.fpr;
              d["tpr"] = curve.tpr;
              d["thresholds"] = curve.thresholds;
              d["auc"] = curve.auc;
              return d;
          },
          py::arg("y_true"), py::arg("scores"));

    m.def("grid_search",
          [](const Dataset& train, std::vector<std::size_t> n_trees,
             std::vector<std::optional<std::size_t>> max_depth,
             std::vector<std::size_t> min_samples_split,
             std::vector<std::string> max_features, std::size_t smote_k,
             double target_ratio, std::size_t folds, const RandomSource& rng,
             unsigned threads) {
              ParamGrid grid;
              grid.n_trees = std::move(n_trees);
              grid.max_depth = std::move(max_depth);
              grid.min_samples_split = std::move(min_samples_split);
              grid.max_features.clear();
              for (const auto& mf : max_features)
                  grid.max_features.push_back(MaxFeatures::parse(mf));
              const TuningResult result = grid_search(
                  train, grid, SmoteConfig{smote_k, target_ratio}, folds, rng,
                  threads);
              const auto params_dict = [](const ForestParams& p) {
                  py::dict d;
                  d["n_trees"] = p.n_trees;
                  d["max_depth"] = p.max_depth ? py::cast(*p.max_depth) : py::none();
                  d["min_samples_split"] = p.min_samples_split;
                  d["max_features"] = p.max_features.to_string();
                  d["bootstrap"] = p.bootstrap;
                  return d;
              };
              py::list table;
              for (const auto& cell : result.table) {
                  py::dict row;
                  row["params"] = params_dict(cell.params);
                  row["mean_f1"] = cell.mean_f1;
                  row["fold_f1"] = cell.fold_f1;
                  table.append(row);
              }
              py::dict d;
              d["best_params"] = params_dict(result.best_params);
              d["best_score"] = result.best_score;
              d["table"] = table;
              return d;
          },
          py::arg("train"),
          py::arg("n_trees") = std::vector<std::size_t>{50, 100, 200},
          py::arg("max_depth") =
              std::vector<std::optional<std::size_t>>{8, 16, std::nullopt},
          py::arg("min_samples_split") = std::vector<std::size_t>{2, 10},
          py::arg("max_features") = std::vector<std::string>{"sqrt"},
          py::arg("smote_k") = 5, py::arg("target_ratio") = 1.0,
          py::arg("folds") = 5, py::arg("rng"), py::arg("threads") = 1);

    m.def("run_json",
          [](const std::string& config_text, const std::string& out_dir,
             unsigned threads, bool no_timing) {
              const RunConfig cfg = load_config_text(config_text, "<config>");
              const auto report =
                  cmd_run(cfg, out_dir, RunOptions{threads, no_timing});
              return report.dump();
          },
          py::arg("config_text"), py::arg("out_dir"), py::arg("threads") = 1,
          py::arg("no_timing") = true);
}
