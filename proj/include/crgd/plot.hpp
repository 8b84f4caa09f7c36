#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace crgd {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;  // empty: next palette color
  bool dashed = false;
  bool markers = false;
};

struct Axes {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  int width = 760;
  int height = 500;
};

// Static SVG line chart. Non-finite points, and non-positive ones on log axes,
// break the polyline.
std::string line_chart_svg(const std::vector<Series>& series, const Axes& axes);

// Samples of f on a regular mesh, row-major with y as the outer index.
struct ScalarGrid {
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;
  int nx = 0, ny = 0;
  std::vector<double> values;

  double x(int i) const { return x_lo + (x_hi - x_lo) * i / (nx - 1); }
  double y(int j) const { return y_lo + (y_hi - y_lo) * j / (ny - 1); }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

// Marching squares: line segments {x0, y0, x1, y1} of the level set.
// Saddle cells are resolved with the cell-center average.
std::vector<std::array<double, 4>> contour_segments(const ScalarGrid& grid, double level);

// Contour lines of `grid` at `levels` with trajectories drawn on top.
std::string contour_chart_svg(const ScalarGrid& grid, const std::vector<double>& levels,
                              const std::vector<Series>& overlays, const Axes& axes);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace crgd
