#include "crgd/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace crgd {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr int kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;

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

std::string fmt_tick(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << v;
  return s.str();
}

// Maps data coordinates to pixels on one axis (log10 when requested).
struct Scale {
  double lo = 0.0, hi = 1.0;  // in transformed units
  double p0 = 0.0, p1 = 1.0;  // pixel range
  bool log = false;

  double transform(double v) const { return log ? std::log10(v) : v; }
  bool valid(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double operator()(double v) const { return p0 + (transform(v) - lo) / (hi - lo) * (p1 - p0); }
};

Scale make_scale(std::vector<double> values, bool log, double p0, double p1) {
  Scale s;
  s.log = log;
  s.p0 = p0;
  s.p1 = p1;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    if (!s.valid(v)) continue;
    lo = std::min(lo, s.transform(v));
    hi = std::max(hi, s.transform(v));
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    lo -= 0.5;
    hi += 0.5;
  }
  if (log) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
  } else {
    const double pad = 0.03 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  s.lo = lo;
  s.hi = hi;
  return s;
}

std::vector<double> ticks(const Scale& s) {
  std::vector<double> out;
  if (s.log) {
    const int step = std::max(1, static_cast<int>(std::ceil((s.hi - s.lo) / 8.0)));
    for (double e = s.lo; e <= s.hi + 1e-9; e += step) out.push_back(std::pow(10.0, e));
    return out;
  }
  const double raw = (s.hi - s.lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  for (double v = std::ceil(s.lo / step) * step; v <= s.hi + 1e-9 * step; v += step) {
    out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return out;
}

class Svg {
 public:
  Svg(int w, int h) {
    out_ << std::setprecision(6);
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
         << "\" viewBox=\"0 0 " << w << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  void line(double x0, double y0, double x1, double y1, const std::string& stroke, double width,
            bool dashed = false) {
    out_ << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y1
         << "\" stroke=\"" << stroke << "\" stroke-width=\"" << width << '"';
    if (dashed) out_ << " stroke-dasharray=\"6 4\"";
    out_ << "/>\n";
  }

  void text(double x, double y, const std::string& s, const char* anchor = "middle",
            double rotate = 0.0, int size = 12) {
    out_ << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor
         << "\" font-size=\"" << size << '"';
    if (rotate != 0.0) out_ << " transform=\"rotate(" << rotate << ' ' << x << ' ' << y << ")\"";
    out_ << '>' << escape(s) << "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                bool dashed) {
    if (pts.size() < 2) return;
    out_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.8\"";
    if (dashed) out_ << " stroke-dasharray=\"6 4\"";
    out_ << " points=\"";
    for (const auto& [x, y] : pts) out_ << x << ',' << y << ' ';
    out_ << "\"/>\n";
  }

  void circle(double x, double y, double r, const std::string& fill) {
    out_ << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << r << "\" fill=\"" << fill
         << "\"/>\n";
  }

  void raw(const std::string& s) { out_ << s; }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

void draw_frame(Svg& svg, const Axes& axes, const Scale& sx, const Scale& sy) {
  const double x0 = kLeft, x1 = axes.width - kRight, y0 = axes.height - kBottom, y1 = kTop;
  for (double t : ticks(sx)) {
    const double px = sx(t);
    svg.line(px, y0, px, y1, "#e6e6e6", 1.0);
    svg.line(px, y0, px, y0 + 5, "black", 1.0);
    svg.text(px, y0 + 18, fmt_tick(t));
  }
  for (double t : ticks(sy)) {
    const double py = sy(t);
    svg.line(x0, py, x1, py, "#e6e6e6", 1.0);
    svg.line(x0 - 5, py, x0, py, "black", 1.0);
    svg.text(x0 - 8, py + 4, fmt_tick(t), "end");
  }
  svg.line(x0, y0, x1, y0, "black", 1.2);
  svg.line(x0, y0, x0, y1, "black", 1.2);
  svg.text(0.5 * (x0 + x1), axes.height - 15, axes.xlabel);
  svg.text(20, 0.5 * (y0 + y1), axes.ylabel, "middle", -90.0);
  svg.text(0.5 * (x0 + x1), 22, axes.title, "middle", 0.0, 14);
}

void draw_series(Svg& svg, const std::vector<Series>& series, const Axes& axes, const Scale& sx,
                 const Scale& sy) {
  const double lx = axes.width - kRight + 12;
  double ly = kTop + 10;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const std::string color = s.color.empty() ? kPalette[k % std::size(kPalette)] : s.color;
    std::vector<std::pair<double, double>> run;
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!sx.valid(s.x[i]) || !sy.valid(s.y[i])) {
        svg.polyline(run, color, s.dashed);
        run.clear();
        continue;
      }
      run.emplace_back(sx(s.x[i]), sy(s.y[i]));
      if (s.markers) svg.circle(run.back().first, run.back().second, 3.0, color);
    }
    svg.polyline(run, color, s.dashed);
    if (!s.label.empty()) {
      svg.line(lx, ly, lx + 22, ly, color, 2.0, s.dashed);
      svg.text(lx + 28, ly + 4, s.label, "start");
      ly += 18;
    }
  }
}

}  // namespace

std::string line_chart_svg(const std::vector<Series>& series, const Axes& axes) {
  std::vector<double> xs, ys;
  for (const Series& s : series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Scale sx = make_scale(xs, axes.logx, kLeft, axes.width - kRight);
  const Scale sy = make_scale(ys, axes.logy, axes.height - kBottom, kTop);
  Svg svg(axes.width, axes.height);
  draw_frame(svg, axes, sx, sy);
  draw_series(svg, series, axes, sx, sy);
  return svg.finish();
}

std::vector<std::array<double, 4>> contour_segments(const ScalarGrid& grid, double level) {
  if (grid.nx < 2 || grid.ny < 2 ||
      grid.values.size() != static_cast<std::size_t>(grid.nx) * grid.ny) {
    throw std::invalid_argument("contour_segments: malformed grid");
  }
  std::vector<std::array<double, 4>> segs;
  auto lerp = [&](double xa, double ya, double va, double xb, double yb, double vb) {
    const double t = (level - va) / (vb - va);
    return std::array<double, 2>{xa + t * (xb - xa), ya + t * (yb - ya)};
  };
  for (int j = 0; j + 1 < grid.ny; ++j) {
    for (int i = 0; i + 1 < grid.nx; ++i) {
      // Corners counter-clockwise from bottom-left.
      const double xs[4] = {grid.x(i), grid.x(i + 1), grid.x(i + 1), grid.x(i)};
      const double ys[4] = {grid.y(j), grid.y(j), grid.y(j + 1), grid.y(j + 1)};
      const double vs[4] = {grid.at(i, j), grid.at(i + 1, j), grid.at(i + 1, j + 1),
                            grid.at(i, j + 1)};
      if (!std::all_of(std::begin(vs), std::end(vs), [](double v) { return std::isfinite(v); })) {
        continue;
      }
      std::vector<std::array<double, 2>> pts;
      for (int e = 0; e < 4; ++e) {
        const int a = e, b = (e + 1) % 4;
        if ((vs[a] < level) != (vs[b] < level)) {
          pts.push_back(lerp(xs[a], ys[a], vs[a], xs[b], ys[b], vs[b]));
        }
      }
      if (pts.size() == 2) {
        segs.push_back({pts[0][0], pts[0][1], pts[1][0], pts[1][1]});
      } else if (pts.size() == 4) {
        // Crossings lie on edges 0..3 in order. Pair them so the segments do
        // not separate corners that agree with the center.
        const double center = 0.25 * (vs[0] + vs[1] + vs[2] + vs[3]);
        const bool corner0_high = vs[0] >= level;
        const bool center_high = center >= level;
        if (corner0_high == center_high) {
          segs.push_back({pts[0][0], pts[0][1], pts[3][0], pts[3][1]});
          segs.push_back({pts[1][0], pts[1][1], pts[2][0], pts[2][1]});
        } else {
          segs.push_back({pts[0][0], pts[0][1], pts[1][0], pts[1][1]});
          segs.push_back({pts[2][0], pts[2][1], pts[3][0], pts[3][1]});
        }
      }
    }
  }
  return segs;
}

std::string contour_chart_svg(const ScalarGrid& grid, const std::vector<double>& levels,
                              const std::vector<Series>& overlays, const Axes& axes) {
  const Scale sx = make_scale({grid.x_lo, grid.x_hi}, false, kLeft, axes.width - kRight);
  const Scale sy = make_scale({grid.y_lo, grid.y_hi}, false, axes.height - kBottom, kTop);
  Svg svg(axes.width, axes.height);
  draw_frame(svg, axes, sx, sy);
  std::ostringstream paths;
  paths << std::setprecision(6);
  for (std::size_t k = 0; k < levels.size(); ++k) {
    // Light-to-dark gray by level index.
    const int shade = 200 - static_cast<int>(150.0 * k / std::max<std::size_t>(1, levels.size() - 1));
    paths << "<path fill=\"none\" stroke=\"rgb(" << shade << ',' << shade << ',' << shade
          << ")\" stroke-width=\"0.8\" d=\"";
    for (const auto& s : contour_segments(grid, levels[k])) {
      paths << 'M' << sx(s[0]) << ',' << sy(s[1]) << 'L' << sx(s[2]) << ',' << sy(s[3]);
    }
    paths << "\"/>\n";
  }
  svg.raw(paths.str());
  draw_series(svg, overlays, axes, sx, sy);
  return svg.finish();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace crgd
