#include "imbalforest/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace imbalforest {

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("confusion: length mismatch (" +
                                    std::to_string(y_true.size()) + " vs " +
                                    std::to_string(y_pred.size()) + ")");
    if (y_true.empty())
        throw std::invalid_argument("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i];
        const int p = y_pred[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1))
            throw std::invalid_argument("confusion: non-binary value at index " +
                                        std::to_string(i));
        if (t == 1)
            (p == 1 ? cm.tp : cm.fn)++;
        else
            (p == 1 ? cm.fp : cm.tn)++;
    }
    return cm;
}

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return std::nullopt; // 0/0: undefined, flagged by absence
    return double(num) / double(den);
}

std::optional<double> harmonic_f1(const std::optional<double>& p,
                                  const std::optional<double>& r) {
    if (!p || !r) return std::nullopt;
    if (*p + *r == 0.0) return std::nullopt;
    return 2.0 * *p * *r / (*p + *r);
}

} // namespace

ClassReport class_report(const ConfusionMatrix& cm) {
    if (cm.total() == 0)
        throw std::invalid_argument("class_report: empty confusion matrix");
    ClassReport report;
    report.class1.precision = ratio(cm.tp, cm.tp + cm.fp);
    report.class1.recall = ratio(cm.tp, cm.tp + cm.fn);
    report.class1.f1 = harmonic_f1(report.class1.precision, report.class1.recall);
    report.class1.support = cm.tp + cm.fn;
    report.class0.precision = ratio(cm.tn, cm.tn + cm.fn);
    report.class0.recall = ratio(cm.tn, cm.tn + cm.fp);
    report.class0.f1 = harmonic_f1(report.class0.precision, report.class0.recall);
    report.class0.support = cm.tn + cm.fp;
    report.accuracy = double(cm.tp + cm.tn) / double(cm.total());
    return report;
}

RocCurve roc_curve(std::span<const int> y_true, std::span<const double> scores) {
    if (y_true.size() != scores.size())
        throw std::invalid_argument("roc_curve: length mismatch");
    if (y_true.empty())
        throw std::invalid_argument("roc_curve: empty input");
    std::uint64_t n_pos = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] != 0 && y_true[i] != 1)
            throw std::invalid_argument("roc_curve: non-binary label at index " +
                                        std::to_string(i));
        if (!std::isfinite(scores[i]))
            throw std::invalid_argument("roc_curve: non-finite score at index " +
                                        std::to_string(i));
        n_pos += std::uint64_t(y_true[i]);
    }
    const std::uint64_t n_neg = y_true.size() - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("roc_curve: both classes must be present");

    // (score, is_positive) sorted by descending score; equal scores collapse
    // into one operating point.
    std::vector<std::pair<double, int>> order(y_true.size());
    for (std::size_t i = 0; i < y_true.size(); ++i)
        order[i] = {scores[i], y_true[i]};
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    RocCurve curve;
    std::uint64_t cum_pos = 0, cum_neg = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double cutoff = order[i].first;
        // Everything strictly above the cutoff is classified positive.
        curve.thresholds.push_back(cutoff);
        curve.fpr.push_back(double(cum_neg) / double(n_neg));
        curve.tpr.push_back(double(cum_pos) / double(n_pos));
        while (i < order.size() && order[i].first == cutoff) {
            cum_pos += std::uint64_t(order[i].second);
            cum_neg += std::uint64_t(1 - order[i].second);
            ++i;
        }
    }
    // Below the minimum score everything is positive.
    curve.thresholds.push_back(-std::numeric_limits<double>::infinity());
    curve.fpr.push_back(1.0);
    curve.tpr.push_back(1.0);

    curve.auc = auc(curve);
    return curve;
}

double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        area += (curve.fpr[i] - curve.fpr[i - 1]) *
                (curve.tpr[i] + curve.tpr[i - 1]) * 0.5;
    return area;
}

} // namespace imbalforest
