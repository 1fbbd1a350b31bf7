#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace imbalforest {

// Binary confusion counts; positive class = 1 = fraud.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + tn + fp + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const int> y_true,
                          std::span<const int> y_pred);

// A 0/0 metric is nullopt (undefined), never silently 0.
struct ClassMetrics {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::uint64_t support = 0;
};

struct ClassReport {
    ClassMetrics class0;
    ClassMetrics class1;
    double accuracy = 0.0;
};

ClassReport class_report(const ConfusionMatrix& cm);

// Operating points swept over descending unique score cutoffs; a row is
// classified 1 at cutoff t iff its score > t (matching predict_label). The
// final (1, 1) point carries a -infinity cutoff.
struct RocCurve {
    std::vector<double> fpr;
    std::vector<double> tpr;
    std::vector<double> thresholds;
    double auc = 0.0;

    std::size_t size() const { return fpr.size(); }
};

RocCurve roc_curve(std::span<const int> y_true, std::span<const double> scores);

// Trapezoidal integral of tpr over fpr.
double auc(const RocCurve& curve);

} // namespace imbalforest
