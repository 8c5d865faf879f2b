#include "cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sgdphase/errors.hpp"

namespace sgdcli::svg {

using sgdphase::ErrorKind;
using sgdphase::fail;

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr double kPlotW = kWidth - kLeft - kRight, kPlotH = kHeight - kTop - kBottom;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" "
         "fill=\"white\"/>\n<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" "
         "font-size=\"14\">" + escape(title) + "</text>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "start") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\">" +
         escape(s) + "</text>\n";
}

std::string axis_labels(const std::string& xl, const std::string& yl) {
  return text(kLeft + kPlotW / 2, kHeight - 12, xl, "middle") + "<text x=\"16\" y=\"" +
         num(kTop + kPlotH / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(kTop + kPlotH / 2) + ")\">" + escape(yl) + "</text>\n";
}

struct LogAxis {
  double lo, hi;  // log10 range
  double to_px(double v, double px0, double len, bool flip) const {
    const double f = (std::log10(v) - lo) / (hi - lo);
    return flip ? px0 + len * (1 - f) : px0 + len * f;
  }
};

LogAxis make_axis(double mn, double mx) {
  double lo = std::floor(std::log10(mn)), hi = std::ceil(std::log10(mx));
  if (hi <= lo) hi = lo + 1;
  return {lo, hi};
}

void require_positive(double v, const char* axis) {
  if (!(v > 0.0) || !std::isfinite(v))
    fail(ErrorKind::axis_domain,
         std::string("non-positive or non-finite value on the log ") + axis + " axis");
}

std::string colour_scale(double f) {
  // Blue to yellow through green.
  f = std::clamp(f, 0.0, 1.0);
  const double r = 68 + f * (253 - 68), g = 1 + f * (231 - 1), b = 84 + f * (37 - 84);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", int(std::lround(r)), int(std::lround(g)),
                int(std::lround(b)));
  return buf;
}

}  // namespace

std::string render_loglog(const LineChart& chart) {
  if (chart.series.empty()) fail(ErrorKind::invalid_spec, "plot needs at least one series");
  double xmin = INFINITY, xmax = 0, ymin = INFINITY, ymax = 0;
  for (const auto& s : chart.series) {
    if (s.x.size() != s.y.size()) fail(ErrorKind::invalid_spec, "series " + s.name + " has ragged data");
    if (s.x.empty()) fail(ErrorKind::invalid_spec, "series " + s.name + " is empty");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      require_positive(s.x[i], "x");
      require_positive(s.y[i], "y");
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  const LogAxis ax = make_axis(xmin, xmax), ay = make_axis(ymin, ymax);
  auto px = [&](double x) { return ax.to_px(x, kLeft, kPlotW, false); };
  auto py = [&](double y) { return ay.to_px(y, kTop, kPlotH, true); };

  std::string out = header(chart.title);
  out += "<defs><clipPath id=\"plot\"><rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) +
         "\" width=\"" + num(kPlotW) + "\" height=\"" + num(kPlotH) + "\"/></clipPath></defs>\n";
  out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kPlotW) +
         "\" height=\"" + num(kPlotH) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = ax.lo; e <= ax.hi; e += 1) {
    const double x = px(std::pow(10.0, e));
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(x) + "\" y2=\"" +
           num(kTop + kPlotH) + "\" stroke=\"#dddddd\"/>\n";
    out += text(x, kTop + kPlotH + 15, "1e" + std::to_string(int(e)), "middle");
  }
  for (double e = ay.lo; e <= ay.hi; e += 1) {
    const double y = py(std::pow(10.0, e));
    out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft + kPlotW) +
           "\" y2=\"" + num(y) + "\" stroke=\"#dddddd\"/>\n";
    out += text(kLeft - 5, y + 4, "1e" + std::to_string(int(e)), "end");
  }
  out += axis_labels(chart.x_label, chart.y_label);

  double legend_y = kTop + 10;
  auto legend = [&](const std::string& label, const std::string& colour, bool dashed) {
    const double x = kLeft + kPlotW + 10;
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(legend_y) + "\" x2=\"" + num(x + 20) +
           "\" y2=\"" + num(legend_y) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"" +
           (dashed ? " stroke-dasharray=\"5,3\"" : "") + "/>\n";
    out += text(x + 25, legend_y + 4, label);
    legend_y += 16;
  };

  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& s = chart.series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    out += "<polyline clip-path=\"url(#plot)\" fill=\"none\" stroke=\"" + std::string(colour) +
           "\" stroke-width=\"1.5\"" + (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) out += ' ';
      out += num(px(s.x[i])) + "," + num(py(s.y[i]));
    }
    out += "\"/>\n";
    legend(s.name, colour, s.dashed);
  }
  for (const auto& g : chart.guides) {
    const double x0 = std::pow(10.0, ax.lo), x1 = std::pow(10.0, ax.hi);
    const double y0 = g.y0 * std::pow(x0 / g.x0, g.slope), y1 = g.y0 * std::pow(x1 / g.x0, g.slope);
    out += "<line clip-path=\"url(#plot)\" x1=\"" + num(px(x0)) + "\" y1=\"" + num(py(y0)) +
           "\" x2=\"" + num(px(x1)) + "\" y2=\"" + num(py(y1)) +
           "\" stroke=\"#777777\" stroke-dasharray=\"2,3\"/>\n";
    legend(g.label, "#777777", true);
  }
  for (const auto& m : chart.markers) {
    require_positive(m.x, "x");
    const double x = px(m.x);
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(x) + "\" y2=\"" +
           num(kTop + kPlotH) + "\" stroke=\"black\" stroke-dasharray=\"1,2\"/>\n";
    out += text(x + 3, kTop + 12, m.label);
  }
  out += "</svg>\n";
  return out;
}

std::string render_heatmap(const Heatmap& map) {
  const std::size_t nx = map.xs.size(), ny = map.ys.size();
  if (nx == 0 || ny == 0) fail(ErrorKind::invalid_spec, "heatmap needs at least one cell");
  if (map.values.size() != nx * ny) fail(ErrorKind::invalid_spec, "heatmap values do not match the grid");
  auto edges = [](const std::vector<double>& c) {
    std::vector<double> e(c.size() + 1);
    if (c.size() == 1) {
      e[0] = c[0] - 0.5;
      e[1] = c[0] + 0.5;
      return e;
    }
    for (std::size_t i = 1; i < c.size(); ++i) e[i] = 0.5 * (c[i - 1] + c[i]);
    e[0] = c[0] - (e[1] - c[0]);
    e[c.size()] = c.back() + (c.back() - e[c.size() - 1]);
    return e;
  };
  const auto ex = edges(map.xs), ey = edges(map.ys);
  auto px = [&](double x) { return kLeft + kPlotW * (x - ex.front()) / (ex.back() - ex.front()); };
  auto py = [&](double y) { return kTop + kPlotH * (1 - (y - ey.front()) / (ey.back() - ey.front())); };

  double vmin = INFINITY, vmax = -INFINITY;
  for (double v : map.values)
    if (std::isfinite(v)) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  const bool categorical = !map.legend.empty();

  std::string out = header(map.title);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double v = map.values[iy * nx + ix];
      std::string colour;
      if (categorical)
        colour = std::isfinite(v) ? kPalette[std::size_t(v) % std::size(kPalette)] : "#000000";
      else if (!std::isfinite(v))
        colour = "#000000";
      else
        colour = colour_scale(vmax > vmin ? (v - vmin) / (vmax - vmin) : 0.5);
      out += "<rect x=\"" + num(px(ex[ix])) + "\" y=\"" + num(py(ey[iy + 1])) + "\" width=\"" +
             num(px(ex[ix + 1]) - px(ex[ix])) + "\" height=\"" + num(py(ey[iy]) - py(ey[iy + 1])) +
             "\" fill=\"" + colour + "\"/>\n";
    }
  }
  out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kPlotW) +
         "\" height=\"" + num(kPlotH) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (std::size_t ix = 0; ix < nx; ix += std::max<std::size_t>(1, nx / 8))
    out += text(px(map.xs[ix]), kTop + kPlotH + 15, num(map.xs[ix]), "middle");
  for (std::size_t iy = 0; iy < ny; iy += std::max<std::size_t>(1, ny / 8))
    out += text(kLeft - 5, py(map.ys[iy]) + 4, num(map.ys[iy]), "end");
  out += axis_labels(map.x_label, map.y_label);

  if (!map.boundary.empty()) {
    out += "<polyline fill=\"none\" stroke=\"white\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < map.boundary.size(); ++i) {
      if (i) out += ' ';
      const double x = std::clamp(map.boundary[i].first, ex.front(), ex.back());
      const double y = std::clamp(map.boundary[i].second, ey.front(), ey.back());
      out += num(px(x)) + "," + num(py(y));
    }
    out += "\"/>\n";
  }
  double ly = kTop + 10;
  const double lx = kLeft + kPlotW + 10;
  if (categorical) {
    for (std::size_t i = 0; i < map.legend.size(); ++i, ly += 16) {
      out += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 8) + "\" width=\"12\" height=\"12\" fill=\"" +
             kPalette[i % std::size(kPalette)] + "\"/>\n";
      out += text(lx + 16, ly + 2, map.legend[i]);
    }
  } else if (std::isfinite(vmin)) {
    out += text(lx, ly, "min " + num(vmin));
    out += text(lx, ly + 16, "max " + num(vmax));
    out += text(lx, ly + 32, "black: not finite");
    ly += 48;
  }
  if (!map.boundary_label.empty()) {
    out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 20) + "\" y2=\"" +
           num(ly) + "\" stroke=\"gray\" stroke-width=\"2\"/>\n";
    out += text(lx + 25, ly + 4, map.boundary_label);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace sgdcli::svg
