#include "mpcc/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

namespace mpcc {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

constexpr double kMarginLeft = 78.0;
constexpr double kMarginRight = 170.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 56.0;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    // Fixed two decimals keeps the byte output stable and compact.
    std::string s = fmt::format("{:.2f}", v);
    if (s == "-0.00") s = "0.00";
    return s;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool empty() const { return lo > hi; }
};

/// Tick step of the form {1, 2, 5} * 10^k giving roughly `target` ticks.
double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    const double nice = f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0;
    return nice * mag;
}

void widen(Range& r) {
    if (r.empty()) {
        r.lo = 0.0;
        r.hi = 1.0;
    } else if (r.hi - r.lo < 1e-12 * std::max(1.0, std::abs(r.hi))) {
        const double pad = std::max(1e-9, std::abs(r.hi) * 0.05);
        r.lo -= pad;
        r.hi += pad;
    }
}

std::string tick_label(double v, double step) {
    if (std::abs(v) < step * 1e-6) v = 0.0;
    const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
    return fmt::format("{:.{}f}", v, decimals);
}

void check(const Series& s) {
    if (s.x.empty() || s.x.size() != s.y.size()) {
        throw EmptyData(fmt::format("series '{}' needs equally many, and at least one, x and y values", s.label));
    }
}

void check(const Band& b) {
    if (b.x.empty() || b.x.size() != b.lo.size() || b.x.size() != b.hi.size()) {
        throw EmptyData(fmt::format("band '{}' needs equally many, and at least one, x, lo and hi values", b.label));
    }
}

}  // namespace

std::string render_chart(const ChartData& data, const ChartStyle& style) {
    if (data.series.empty() && data.bands.empty()) throw EmptyData("chart has no series or bands");
    for (const auto& s : data.series) check(s);
    for (const auto& b : data.bands) check(b);

    Range xr, yr;
    for (const auto& s : data.series) {
        for (double v : s.x) xr.add(v);
        for (double v : s.y) yr.add(v);
    }
    for (const auto& b : data.bands) {
        for (double v : b.x) xr.add(v);
        for (double v : b.lo) yr.add(v);
        for (double v : b.hi) yr.add(v);
    }
    for (const auto& g : data.guides) yr.add(g.y);
    widen(xr);
    widen(yr);

    const double y_step = nice_step(yr.hi - yr.lo, 6);
    yr.lo = std::floor(yr.lo / y_step) * y_step;
    yr.hi = std::ceil(yr.hi / y_step) * y_step;
    const double x_step = nice_step(xr.hi - xr.lo, 8);

    const double w = style.width;
    const double h = style.height;
    const double pw = w - kMarginLeft - kMarginRight;
    const double ph = h - kMarginTop - kMarginBottom;
    auto px = [&](double x) { return kMarginLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return kMarginTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
        "viewBox=\"0 0 {} {}\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"12\">\n",
        style.width, style.height, style.width, style.height);
    out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", style.width,
                       style.height);
    if (!style.title.empty()) {
        out += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                           num(kMarginLeft + pw / 2), escape(style.title));
    }

    // Grid and tick labels.
    out += "<g stroke=\"#e0e0e0\" stroke-width=\"1\">\n";
    for (double y = yr.lo; y <= yr.hi + y_step * 1e-6; y += y_step) {
        out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", num(kMarginLeft), num(py(y)),
                           num(kMarginLeft + pw), num(py(y)));
    }
    const double x_first = std::ceil(xr.lo / x_step - 1e-9) * x_step;
    for (double x = x_first; x <= xr.hi + x_step * 1e-6; x += x_step) {
        out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", num(px(x)), num(kMarginTop),
                           num(px(x)), num(kMarginTop + ph));
    }
    out += "</g>\n<g fill=\"#333333\">\n";
    for (double y = yr.lo; y <= yr.hi + y_step * 1e-6; y += y_step) {
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(kMarginLeft - 6),
                           num(py(y) + 4), tick_label(y, y_step));
    }
    for (double x = x_first; x <= xr.hi + x_step * 1e-6; x += x_step) {
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(px(x)),
                           num(kMarginTop + ph + 18), tick_label(x, x_step));
    }
    out += "</g>\n";
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\"/>\n",
                       num(kMarginLeft), num(kMarginTop), num(pw), num(ph));
    if (!style.x_label.empty()) {
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(kMarginLeft + pw / 2),
                           num(h - 14), escape(style.x_label));
    }
    if (!style.y_label.empty()) {
        out += fmt::format(
            "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
            num(kMarginTop + ph / 2), num(kMarginTop + ph / 2), escape(style.y_label));
    }

    struct LegendEntry {
        std::string label;
        std::string color;
        bool dashed;
        bool filled;
    };
    std::vector<LegendEntry> legend;
    std::size_t next_color = 0;
    auto pick = [&](const std::string& c) { return c.empty() ? std::string(kPalette[next_color++ % kPaletteSize]) : c; };

    for (const auto& b : data.bands) {
        const std::string color = pick(b.color);
        std::string pts;
        for (std::size_t i = 0; i < b.x.size(); ++i) pts += fmt::format("{},{} ", num(px(b.x[i])), num(py(b.hi[i])));
        for (std::size_t i = b.x.size(); i-- > 0;) pts += fmt::format("{},{} ", num(px(b.x[i])), num(py(b.lo[i])));
        pts.pop_back();
        out += fmt::format(
            "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.35\" stroke=\"{}\" stroke-width=\"1\"/>\n", pts,
            color, color);
        if (!b.label.empty()) legend.push_back({b.label, color, false, true});
    }

    for (const auto& g : data.guides) {
        out += fmt::format(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#555555\" stroke-width=\"1\" "
            "stroke-dasharray=\"2,3\"/>\n",
            num(kMarginLeft), num(py(g.y)), num(kMarginLeft + pw), num(py(g.y)));
        if (!g.label.empty()) {
            out += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"#555555\" font-size=\"10\">{}</text>\n",
                               num(kMarginLeft + pw + 4), num(py(g.y) + 3), escape(g.label));
        }
    }

    for (const auto& s : data.series) {
        const std::string color = pick(s.color);
        if (s.markers) {
            out += fmt::format("<g fill=\"{}\">\n", color);
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.y[i])) continue;
                out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"1.6\"/>\n", num(px(s.x[i])), num(py(s.y[i])));
            }
            out += "</g>\n";
        } else {
            std::string pts;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.y[i])) continue;
                pts += fmt::format("{},{} ", num(px(s.x[i])), num(py(s.y[i])));
            }
            if (!pts.empty()) {
                pts.pop_back();
                out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{}/>\n",
                                   pts, color, s.dashed ? " stroke-dasharray=\"5,3\"" : "");
            }
        }
        if (!s.label.empty()) legend.push_back({s.label, color, s.dashed, s.markers});
    }

    const double lx = kMarginLeft + pw + 60;
    double ly = kMarginTop + 8;
    for (const auto& e : legend) {
        if (e.filled) {
            out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"18\" height=\"8\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
                               num(lx), num(ly - 4), e.color);
        } else {
            out += fmt::format(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"{}/>\n", num(lx),
                num(ly), num(lx + 18), num(ly), e.color, e.dashed ? " stroke-dasharray=\"5,3\"" : "");
        }
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>\n", num(lx + 24), num(ly + 4),
                           escape(e.label));
        ly += 18;
    }

    out += "</svg>\n";
    return out;
}

}  // namespace mpcc
