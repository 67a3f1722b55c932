#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mpcc {

class EmptyData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color;  // empty picks from the palette
    bool dashed = false;
    /// Draw unconnected markers instead of a polyline.
    bool markers = false;
};

/// Filled region between lo and hi over x.
struct Band {
    std::string label;
    std::vector<double> x;
    std::vector<double> lo;
    std::vector<double> hi;
    std::string color;
};

/// Horizontal reference line across the plot.
struct GuideLine {
    double y = 0.0;
    std::string label;
};

struct ChartData {
    std::vector<Series> series;
    std::vector<Band> bands;
    std::vector<GuideLine> guides;
};

struct ChartStyle {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 760;
    int height = 460;
};

/// Self-contained SVG 1.1 document. Output depends only on the arguments.
/// Throws EmptyData when there is nothing to plot or a series/band has
/// mismatched or empty coordinate vectors.
std::string render_chart(const ChartData& data, const ChartStyle& style);

}  // namespace mpcc
