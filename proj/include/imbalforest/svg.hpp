#pragma once

#include <string>

#include "imbalforest/eval.hpp"
#include "imbalforest/preprocess.hpp"

namespace imbalforest {

// Self-contained SVG documents emitted by direct markup, no plotting
// dependency. Output is a pure function of the inputs (fixed layout, fixed
// decimal formatting), so renders are byte-reproducible.

std::string heatmap_svg(const CorrMatrix& corr);
std::string roc_svg(const RocCurve& curve, const std::string& watermark = "");
std::string confusion_svg(const ConfusionMatrix& cm,
                          const std::string& watermark = "");

} // namespace imbalforest
