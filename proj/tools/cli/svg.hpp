#pragma once

#include <string>
#include <utility>
#include <vector>

namespace sgdcli::svg {

struct Series {
  std::string name;
  std::vector<double> x, y;
  bool dashed = false;
};

// Straight line of the given log-log slope through (x0, y0).
struct Guide {
  std::string label;
  double slope = 0;
  double x0 = 1, y0 = 1;
};

struct Marker {
  std::string label;
  double x = 1;
};

struct LineChart {
  std::string title, x_label, y_label;
  std::vector<Series> series;
  std::vector<Guide> guides;
  std::vector<Marker> markers;
};

// Log-log line chart. Throws axis_domain for a non-positive coordinate and
// invalid_spec when there is nothing to draw.
std::string render_loglog(const LineChart& chart);

struct Heatmap {
  std::string title, x_label, y_label;
  std::vector<double> xs, ys;  // cell centres, increasing
  std::vector<double> values;  // row-major: values[iy * xs.size() + ix]
  // Categorical maps colour value i with legend[i]; otherwise the colour scale
  // is linear in the finite values and non-finite cells are drawn black.
  std::vector<std::string> legend;
  std::vector<std::pair<double, double>> boundary;  // (x, y) polyline
  std::string boundary_label;
};

std::string render_heatmap(const Heatmap& map);

}  // namespace sgdcli::svg
