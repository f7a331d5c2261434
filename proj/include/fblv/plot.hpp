#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fblv::plot {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Figure {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::optional<double> guide_y;  // dashed horizontal line
    std::string guide_label;
};

/// Standalone SVG document. Empty or degenerate series still render.
std::string to_svg(const Figure& figure, int width = 640, int height = 400);

}  // namespace fblv::plot
