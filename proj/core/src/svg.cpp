#include "nav2goal/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nav2goal::plot {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
};

void header(std::ostringstream& os, int w, int h) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << ' ' << h << "\">\n";
  os << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
}

void text(std::ostringstream& os, double x, double y, const std::string& s, const char* anchor = "middle",
          int size = 12) {
  os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"" << size
     << "\" text-anchor=\"" << anchor << "\">" << escape(s) << "</text>\n";
}

}  // namespace

std::string render_line_chart(const LineChart& chart) {
  const double left = 60, right = 150, top = 36, bottom = 48;
  const double pw = chart.width - left - right;
  const double ph = chart.height - top - bottom;
  Range xr, yr;
  for (const auto& s : chart.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.finish();
  yr.finish();
  auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return top + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream os;
  header(os, chart.width, chart.height);
  text(os, chart.width / 2.0, 22, chart.title, "middle", 14);
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    text(os, px(xv), top + ph + 16, num(xv), "middle", 10);
    text(os, left - 6, py(yv) + 4, num(yv), "end", 10);
  }
  text(os, left + pw / 2.0, chart.height - 10.0, chart.x_label);
  os << "<text x=\"14\" y=\"" << num(top + ph / 2.0) << "\" font-family=\"sans-serif\" font-size=\"12\" "
     << "text-anchor=\"middle\" transform=\"rotate(-90 14 " << num(top + ph / 2.0) << ")\">" << escape(chart.y_label)
     << "</text>\n";

  std::vector<std::pair<std::string, std::string>> legend;
  for (const auto& s : chart.series) {
    const auto n = std::min(s.x.size(), s.y.size());
    if (n == 0) continue;
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" stroke-opacity=\""
       << num(s.opacity) << "\" points=\"";
    for (std::size_t i = 0; i < n; ++i) os << (i ? " " : "") << num(px(s.x[i])) << ',' << num(py(s.y[i]));
    os << "\"/>\n";
    if (!s.label.empty() &&
        std::none_of(legend.begin(), legend.end(), [&](const auto& l) { return l.first == s.label; })) {
      legend.emplace_back(s.label, s.color);
    }
  }
  for (std::size_t i = 0; i < legend.size(); ++i) {
    const double y = top + 14 + 18.0 * i;
    os << "<line x1=\"" << num(left + pw + 10) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left + pw + 30)
       << "\" y2=\"" << num(y) << "\" stroke=\"" << legend[i].second << "\" stroke-width=\"2\"/>\n";
    text(os, left + pw + 36, y + 4, legend[i].first, "start", 11);
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_map(const MapPlot& plot) {
  Range xr, yr;
  if (plot.fit) {
    for (const auto& p : plot.paths) {
      for (const auto& v : p.points) xr.add(v.x), yr.add(v.y);
    }
    for (const auto& v : plot.markers) xr.add(v.x), yr.add(v.y);
    xr.finish();
    yr.finish();
    const double pad = 0.05 * std::max(xr.hi - xr.lo, yr.hi - yr.lo) + 1.0;
    xr.lo -= pad, xr.hi += pad, yr.lo -= pad, yr.hi += pad;
  } else {
    xr.lo = plot.lower.x, xr.hi = plot.upper.x, yr.lo = plot.lower.y, yr.hi = plot.upper.y;
    xr.finish();
    yr.finish();
  }
  const double margin = 30;
  const double span = std::max(xr.hi - xr.lo, yr.hi - yr.lo);
  const double scale = std::min(plot.width, plot.height) * 1.0 - 2 * margin;
  auto px = [&](double x) { return margin + (x - xr.lo) / span * scale; };
  auto py = [&](double y) { return margin + scale - (y - yr.lo) / span * scale; };

  std::ostringstream os;
  header(os, plot.width, plot.height);
  text(os, plot.width / 2.0, 20, plot.title, "middle", 14);
  const auto& bg = plot.background;
  if (bg.nx > 0 && bg.ny > 0 && bg.cells.size() == static_cast<std::size_t>(bg.nx) * bg.ny) {
    const double cw = bg.cell / span * scale;
    os << "<g fill=\"" << bg.color << "\">\n";
    for (int j = 0; j < bg.ny; ++j) {
      for (int i = 0; i < bg.nx; ++i) {
        if (!bg.cells[static_cast<std::size_t>(j) * bg.nx + i]) continue;
        const double x = i * bg.cell;
        const double y = (j + 1) * bg.cell;
        if (x + bg.cell < xr.lo || x > xr.hi || y < yr.lo || y - bg.cell > yr.hi) continue;
        os << "<rect x=\"" << num(px(x)) << "\" y=\"" << num(py(y)) << "\" width=\"" << num(cw) << "\" height=\""
           << num(cw) << "\"/>\n";
      }
    }
    os << "</g>\n";
  }
  for (const auto& p : plot.paths) {
    if (p.points.empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"" << p.color << "\" stroke-width=\"1.5\" stroke-opacity=\""
       << num(p.opacity) << "\" points=\"";
    for (std::size_t i = 0; i < p.points.size(); ++i) {
      os << (i ? " " : "") << num(px(p.points[i].x)) << ',' << num(py(p.points[i].y));
    }
    os << "\"><title>" << escape(p.label) << "</title></polyline>\n";
  }
  for (const auto& m : plot.markers) {
    os << "<circle cx=\"" << num(px(m.x)) << "\" cy=\"" << num(py(m.y)) << "\" r=\"4\" fill=\"none\" "
       << "stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace nav2goal::plot
