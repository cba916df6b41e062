#pragma once

#include <string>
#include <vector>

#include "nav2goal/types.hpp"

namespace nav2goal::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  double opacity = 1.0;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 720;
  int height = 440;
  std::vector<Series> series;
};

std::string render_line_chart(const LineChart& chart);

struct PathLayer {
  std::string label;
  std::vector<Vec2> points;
  std::string color = "#1f77b4";
  double opacity = 1.0;
};

/// Dense boolean raster drawn under the paths (row-major, row 0 at y_min).
struct Raster {
  int nx = 0;
  int ny = 0;
  double cell = 1.0;
  std::vector<bool> cells;
  std::string color = "#f4a582";
};

struct MapPlot {
  std::string title;
  int width = 640;
  int height = 640;
  Vec2 lower{};
  Vec2 upper{};
  /// Fit the view to the paths and markers instead of lower/upper.
  bool fit = true;
  Raster background;
  std::vector<PathLayer> paths;
  std::vector<Vec2> markers;
};

std::string render_map(const MapPlot& plot);

}  // namespace nav2goal::plot
