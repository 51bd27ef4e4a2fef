#pragma once
#include <string>
#include <vector>

namespace crf {

struct PlotPoint {
    double x = 0.0;
    double y = 0.0;
};

struct Series {
    std::string label;
    std::vector<PlotPoint> points;
    std::string color = "#1f6fb2";
    bool line = true;
    bool markers = false;
};

struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    int width = 720;
    int height = 480;
};

// Self-contained SVG line/scatter plot: axes with nice-number ticks, grid
// lines, legend. Throws SpecError on empty input or non-finite coordinates.
std::string render_plot(const PlotSpec& spec, const std::vector<Series>& series);

} // namespace crf
