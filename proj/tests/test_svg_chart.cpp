#include <doctest.h>

#include <cmath>
#include <string>

#include "mpcc/svg_chart.hpp"

using namespace mpcc;

namespace {

std::size_t count(const std::string& haystack, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("one series renders as one polyline") {
    ChartData data;
    data.series.push_back({"flow", {0, 1, 2}, {5, 7, 6}});
    const auto svg = render_chart(data, {"Title & more", "t", "flow"});
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"") != std::string::npos);
    CHECK(count(svg, "<polyline") == 1);
    CHECK(svg.find("Title &amp; more") != std::string::npos);
    CHECK(svg.find(">flow<") != std::string::npos);
    CHECK(svg.substr(svg.size() - 7) == "</svg>\n");

    // Three vertices in the points attribute.
    const auto start = svg.find("points=\"", svg.find("<polyline")) + 8;
    const auto pts = svg.substr(start, svg.find('"', start) - start);
    CHECK(count(pts, ",") == 3);
}

TEST_CASE("bands, guides, markers and dashes") {
    ChartData data;
    data.bands.push_back({"range", {0.1, 0.2, 0.3}, {-1, -2, -1}, {1, 2, 3}});
    data.guides.push_back({0.5, "C/P"});
    data.series.push_back({"dots", {0.1, 0.2}, {0, 1}, "#000000", false, true});
    data.series.push_back({"dashed", {0.1, 0.2}, {0, 1}, "", true});
    const auto svg = render_chart(data, {});
    CHECK(count(svg, "<polygon") == 1);
    CHECK(count(svg, "<circle") == 2);
    CHECK(svg.find("stroke-dasharray=\"2,3\"") != std::string::npos);
    CHECK(svg.find("stroke-dasharray=\"5,3\"") != std::string::npos);
    CHECK(svg.find(">C/P<") != std::string::npos);
    CHECK(svg.find("fill=\"#000000\"") != std::string::npos);
}

TEST_CASE("non-finite points are skipped") {
    ChartData data;
    data.series.push_back({"gap", {0, 1, 2}, {1, NAN, 3}});
    const auto svg = render_chart(data, {});
    const auto start = svg.find("points=\"", svg.find("<polyline")) + 8;
    CHECK(count(svg.substr(start, svg.find('"', start) - start), ",") == 2);
    CHECK(svg.find("nan") == std::string::npos);
}

TEST_CASE("output is deterministic") {
    ChartData data;
    data.series.push_back({"a", {0, 1, 2, 3}, {0.1, 0.4, 0.2, 0.9}});
    data.series.push_back({"b", {0, 1, 2, 3}, {1, 1, 1, 1}});
    CHECK(render_chart(data, {"x"}) == render_chart(data, {"x"}));

    // A flat series still gets a usable axis.
    ChartData flat;
    flat.series.push_back({"c", {0, 1}, {4, 4}});
    CHECK(render_chart(flat, {}).find("<polyline") != std::string::npos);
}

TEST_CASE("empty or malformed data") {
    CHECK_THROWS_AS(render_chart({}, {}), EmptyData);
    ChartData only_guides;
    only_guides.guides.push_back({1.0, "g"});
    CHECK_THROWS_AS(render_chart(only_guides, {}), EmptyData);
    ChartData mismatched;
    mismatched.series.push_back({"m", {0, 1}, {1}});
    CHECK_THROWS_AS(render_chart(mismatched, {}), EmptyData);
    ChartData empty_series;
    empty_series.series.push_back({"e", {}, {}});
    CHECK_THROWS_AS(render_chart(empty_series, {}), EmptyData);
    ChartData bad_band;
    bad_band.bands.push_back({"b", {0, 1}, {0, 1}, {1}});
    CHECK_THROWS_AS(render_chart(bad_band, {}), EmptyData);
}
