#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace hamel::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f77b4";
  double width = 1.5;
};

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

/// Minimal self-contained SVG line chart with numeric axis ticks.
struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool equal_aspect = false;
  int width = 640;
  int height = 480;

  std::string render() const;
};

namespace detail {

inline std::string number(double value, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, value);
  return buf;
}

inline std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

/// Pads degenerate ranges (constant data) so the axis has nonzero extent.
inline Range padded(double lo, double hi) {
  const double scale = std::max(std::abs(lo), std::abs(hi));
  const double span = hi - lo;
  if (!(span > 1e-9 * scale) || span == 0.0) {
    const double pad = scale > 0.0 ? 0.05 * scale : 1.0;
    return {lo - pad, hi + pad};
  }
  return {lo - 0.05 * span, hi + 0.05 * span};
}

/// Tick positions at 1/2/5 x 10^k spacing.
inline std::vector<double> ticks(const Range& r, int target = 6) {
  const double raw = (r.hi - r.lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    step = f * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-9 * step; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

}  // namespace detail

inline std::string LinePlot::render() const {
  constexpr double kLeft = 80.0;
  constexpr double kRight = 20.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 60.0;

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = ymin = 0.0;
    xmax = ymax = 1.0;
  }
  Range xr = detail::padded(xmin, xmax);
  Range yr = detail::padded(ymin, ymax);

  const double plot_w = width - kLeft - kRight;
  const double plot_h = height - kTop - kBottom;
  if (equal_aspect) {
    const double sx = (xr.hi - xr.lo) / plot_w;
    const double sy = (yr.hi - yr.lo) / plot_h;
    const double s = std::max(sx, sy);
    const double cx = 0.5 * (xr.lo + xr.hi);
    const double cy = 0.5 * (yr.lo + yr.hi);
    xr = {cx - 0.5 * s * plot_w, cx + 0.5 * s * plot_w};
    yr = {cy - 0.5 * s * plot_h, cy + 0.5 * s * plot_h};
  }
  const auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  const auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
     << " font-size=\"16\">" << detail::escape(title) << "</text>\n";
  os << "<rect class=\"plot-area\" x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
     << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\""
     << " data-xmin=\"" << detail::number(xr.lo, 17) << "\" data-xmax=\""
     << detail::number(xr.hi, 17) << "\" data-ymin=\"" << detail::number(yr.lo, 17)
     << "\" data-ymax=\"" << detail::number(yr.hi, 17) << "\"/>\n";

  os << "<g class=\"x-ticks\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">\n";
  for (double t : detail::ticks(xr)) {
    const double x = px(t);
    os << "<line x1=\"" << x << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << x << "\" y2=\""
       << kTop + plot_h + 5 << "\" stroke=\"black\"/>"
       << "<text x=\"" << x << "\" y=\"" << kTop + plot_h + 18 << "\">" << detail::number(t)
       << "</text>\n";
  }
  os << "</g>\n";
  os << "<g class=\"y-ticks\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">\n";
  for (double t : detail::ticks(yr)) {
    const double y = py(t);
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
       << "\" stroke=\"black\"/>"
       << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\">" << detail::number(t)
       << "</text>\n";
  }
  os << "</g>\n";
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << height - 15
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << detail::escape(x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << kTop + plot_h / 2
     << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << detail::escape(y_label) << "</text>\n";

  for (const auto& s : series) {
    os << "<polyline class=\"series\" data-label=\"" << detail::escape(s.label)
       << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << s.width
       << "\" points=\"";
    bool first = true;
    for (const auto& [x, y] : s.points) {
      if (!first) os << ' ';
      first = false;
      os << detail::number(px(x), 10) << ',' << detail::number(py(y), 10);
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace hamel::svg
