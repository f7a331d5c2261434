#include "fblv/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace fblv::plot {

namespace {

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    void settle()
    {
        if (lo > hi) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

}  // namespace

std::string to_svg(const Figure& fig, int width, int height)
{
    const double left = 60, right = 20, top = 30, bottom = 45;
    const double pw = width - left - right, ph = height - top - bottom;

    Range rx, ry;
    for (const auto& s : fig.series) {
        for (double v : s.x) rx.add(v);
        for (double v : s.y) ry.add(v);
    }
    if (fig.guide_y) ry.add(*fig.guide_y);
    rx.settle();
    ry.settle();
    auto px = [&](double x) { return left + (x - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto py = [&](double y) { return top + ph - (y - ry.lo) / (ry.hi - ry.lo) * ph; };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        width, height);
    svg += fmt::format("<text x=\"{}\" y=\"18\" text-anchor=\"middle\">{}</text>\n", width / 2, escape(fig.title));
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left,
                       top, pw, ph);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2, height - 8,
                       escape(fig.x_label));
    svg += fmt::format("<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>\n",
                       top + ph / 2, top + ph / 2, escape(fig.y_label));
    for (int i = 0; i <= 4; ++i) {
        const double fx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
        const double fy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:.3g}</text>\n", px(fx),
                           top + ph + 16, fx);
        svg += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n", left - 4, py(fy) + 4,
                           fy);
    }

    if (fig.guide_y) {
        const double y = py(*fig.guide_y);
        svg += fmt::format(
            "<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n", left,
            y, left + pw, y);
        svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\" fill=\"gray\">{}</text>\n",
                           left + pw - 4, y - 4, escape(fig.guide_label));
    }

    for (std::size_t k = 0; k < fig.series.size(); ++k) {
        const auto& s = fig.series[k];
        const char* color = kColors[k % std::size(kColors)];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        std::string points;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            points += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
        }
        if (n == 1) {
            svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"{}\"/>\n", px(s.x[0]), py(s.y[0]),
                               color);
        } else if (!points.empty()) {
            svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color,
                               points);
        }
        svg += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", left + 8, top + 14 + 14 * k, color,
                           escape(s.label));
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace fblv::plot
