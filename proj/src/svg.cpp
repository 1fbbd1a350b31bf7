#include "imbalforest/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

namespace imbalforest {

namespace {

std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

// Diverging blue-white-red map over [-1, 1].
std::string corr_color(double v) {
    v = std::clamp(v, -1.0, 1.0);
    int r = 255, g = 255, b = 255;
    if (v >= 0) {
        g = int(std::lround(255.0 * (1.0 - v)));
        b = g;
    } else {
        r = int(std::lround(255.0 * (1.0 + v)));
        g = r;
    }
    std::ostringstream out;
    out << "rgb(" << r << ',' << g << ',' << b << ')';
    return out.str();
}

void open_svg(std::ostringstream& out, int width, int height) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
        << height << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
}

void text(std::ostringstream& out, double x, double y, const std::string& s,
          const std::string& attrs = "") {
    out << "<text x=\"" << fixed(x, 1) << "\" y=\"" << fixed(y, 1)
        << "\" font-family=\"monospace\" font-size=\"12\"" << attrs << '>' << s
        << "</text>\n";
}

void watermark_banner(std::ostringstream& out, const std::string& note,
                      int width) {
    if (note.empty()) return;
    out << "<text x=\"" << width / 2
        << "\" y=\"14\" font-family=\"monospace\" font-size=\"12\" "
           "fill=\"#c0392b\" text-anchor=\"middle\">"
        << note << "</text>\n";
}

} // namespace

std::string heatmap_svg(const CorrMatrix& corr) {
    const int n = int(corr.names.size());
    const int cell = 64;
    const int left = 150, top = 80;
    const int width = left + n * cell + 20;
    const int height = top + n * cell + 20;

    std::ostringstream out;
    open_svg(out, width, height);
    text(out, left, 30.0, "Feature correlation (Pearson)",
         " font-size=\"15\" font-weight=\"bold\"");

    for (int j = 0; j < n; ++j)
        out << "<text x=\"" << left + j * cell + cell / 2 << "\" y=\"" << top - 8
            << "\" font-family=\"monospace\" font-size=\"11\" "
               "text-anchor=\"middle\">"
            << corr.names[std::size_t(j)] << "</text>\n";

    for (int i = 0; i < n; ++i) {
        out << "<text x=\"" << left - 8 << "\" y=\"" << top + i * cell + cell / 2 + 4
            << "\" font-family=\"monospace\" font-size=\"11\" "
               "text-anchor=\"end\">"
            << corr.names[std::size_t(i)] << "</text>\n";
        for (int j = 0; j < n; ++j) {
            const double v = corr.at(std::size_t(i), std::size_t(j));
            out << "<rect x=\"" << left + j * cell << "\" y=\"" << top + i * cell
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
                << corr_color(v) << "\" stroke=\"#999\"/>\n";
            const bool dark = std::fabs(v) > 0.6;
            out << "<text x=\"" << left + j * cell + cell / 2 << "\" y=\""
                << top + i * cell + cell / 2 + 4
                << "\" font-family=\"monospace\" font-size=\"12\" "
                   "text-anchor=\"middle\" fill=\""
                << (dark ? "white" : "black") << "\">" << fixed(v, 2)
                << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

std::string roc_svg(const RocCurve& curve, const std::string& watermark) {
    const int size = 560;
    const int m = 60; // margin
    const int plot = size - 2 * m;
    const auto sx = [&](double fpr) { return double(m) + fpr * plot; };
    const auto sy = [&](double tpr) { return double(size - m) - tpr * plot; };

    std::ostringstream out;
    open_svg(out, size, size);
    watermark_banner(out, watermark, size);
    text(out, m, 36.0, "ROC curve", " font-size=\"15\" font-weight=\"bold\"");
    text(out, m + plot - 120.0, 36.0, "AUC = " + fixed(curve.auc, 4));

    out << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << plot
        << "\" height=\"" << plot << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double v = t / 5.0;
        text(out, sx(v) - 10, size - m + 18.0, fixed(v, 1));
        text(out, m - 34.0, sy(v) + 4, fixed(v, 1));
        out << "<line x1=\"" << fixed(sx(v), 1) << "\" y1=\"" << size - m
            << "\" x2=\"" << fixed(sx(v), 1) << "\" y2=\"" << size - m + 5
            << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << m - 5 << "\" y1=\"" << fixed(sy(v), 1)
            << "\" x2=\"" << m << "\" y2=\"" << fixed(sy(v), 1)
            << "\" stroke=\"black\"/>\n";
    }
    text(out, m + plot / 2.0 - 80, size - 14.0, "False positive rate");
    out << "<text x=\"18\" y=\"" << m + plot / 2.0
        << "\" font-family=\"monospace\" font-size=\"12\" transform=\"rotate(-90 18 "
        << m + plot / 2.0 << ")\" text-anchor=\"middle\">True positive rate</text>\n";

    out << "<line x1=\"" << fixed(sx(0), 1) << "\" y1=\"" << fixed(sy(0), 1)
        << "\" x2=\"" << fixed(sx(1), 1) << "\" y2=\"" << fixed(sy(1), 1)
        << "\" stroke=\"#aaa\" stroke-dasharray=\"6,4\"/>\n";

    out << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (i) out << ' ';
        out << fixed(sx(curve.fpr[i]), 2) << ',' << fixed(sy(curve.tpr[i]), 2);
    }
    out << "\"/>\n";
    out << "</svg>\n";
    return out.str();
}

std::string confusion_svg(const ConfusionMatrix& cm, const std::string& watermark) {
    const int cell = 150;
    const int left = 140, top = 90;
    const int width = left + 2 * cell + 30;
    const int height = top + 2 * cell + 30;

    const double total = double(cm.total());
    const auto shade = [&](std::uint64_t count) {
        const double frac = total > 0 ? double(count) / total : 0.0;
        const int c = int(std::lround(255.0 * (1.0 - 0.85 * frac)));
        std::ostringstream color;
        color << "rgb(" << c << ',' << c << ",255)";
        return color.str();
    };

    struct Cell {
        int row, col;
        const char* name;
        std::uint64_t count;
    };
    const Cell cells[] = {
        {0, 0, "TN", cm.tn}, {0, 1, "FP", cm.fp},
        {1, 0, "FN", cm.fn}, {1, 1, "TP", cm.tp},
    };

    std::ostringstream out;
    open_svg(out, width, height);
    watermark_banner(out, watermark, width);
    text(out, left, 36.0, "Confusion matrix", " font-size=\"15\" font-weight=\"bold\"");
    text(out, left + cell - 60.0, top - 36.0, "Predicted");
    text(out, left + cell / 2.0 - 4, top - 14.0, "0");
    text(out, left + cell + cell / 2.0 - 4, top - 14.0, "1");
    out << "<text x=\"24\" y=\"" << top + cell
        << "\" font-family=\"monospace\" font-size=\"12\" transform=\"rotate(-90 24 "
        << top + cell << ")\" text-anchor=\"middle\">Actual</text>\n";
    text(out, left - 24.0, top + cell / 2.0 + 4, "0");
    text(out, left - 24.0, top + cell + cell / 2.0 + 4, "1");

    for (const auto& c : cells) {
        const int x = left + c.col * cell;
        const int y = top + c.row * cell;
        out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
            << "\" height=\"" << cell << "\" fill=\"" << shade(c.count)
            << "\" stroke=\"black\"/>\n";
        text(out, x + cell / 2.0 - 10, y + cell / 2.0 - 10, c.name,
             " text-anchor=\"middle\"");
        text(out, x + cell / 2.0, y + cell / 2.0 + 16, std::to_string(c.count),
             " text-anchor=\"middle\" font-size=\"16\"");
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace imbalforest
