#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kicktop::svg {

// Small static SVG emitters for quick inspection of result tables. Pure
// convenience: data files are authoritative and never depend on these.

struct Series {
  std::string label;
  std::vector<double> x, y;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

// piecewise-linear viridis-like ramp
inline std::string heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                              {94, 201, 98}, {253, 231, 37}};
  const double pos = t * 4.0;
  const int lo = std::min(3, int(pos));
  const double f = pos - lo;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                int(stops[lo][0] + f * (stops[lo + 1][0] - stops[lo][0])),
                int(stops[lo][1] + f * (stops[lo + 1][1] - stops[lo][1])),
                int(stops[lo][2] + f * (stops[lo + 1][2] - stops[lo][2])));
  return buf;
}

} // namespace detail

inline void line_plot(const std::string& path, const std::vector<Series>& series,
                      const std::string& xlabel, const std::string& ylabel) {
  if (series.empty()) throw std::invalid_argument("line_plot: no series");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double w = 720, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("line_plot: cannot open " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
      << "' stroke='black'/>\n"
      << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb
      << "' stroke='black'/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    out << "<text x='" << px(fx) << "' y='" << h - mb + 18
        << "' font-size='11' text-anchor='middle'>" << detail::num(fx) << "</text>\n";
    out << "<text x='" << ml - 6 << "' y='" << py(fy) + 4
        << "' font-size='11' text-anchor='end'>" << detail::num(fy) << "</text>\n";
  }
  out << "<text x='" << (ml + w - mr) / 2 << "' y='" << h - 10
      << "' font-size='13' text-anchor='middle'>" << xlabel << "</text>\n";
  out << "<text x='16' y='" << (mt + h - mb) / 2 << "' font-size='13' text-anchor='middle' "
      << "transform='rotate(-90 16 " << (mt + h - mb) / 2 << ")'>" << ylabel << "</text>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    out << "<polyline fill='none' stroke='" << detail::kPalette[si % 8]
        << "' stroke-width='1.2' points='";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << detail::num(px(s.x[i])) << "," << detail::num(py(s.y[i])) << " ";
    out << "'/>\n";
    out << "<text x='" << w - mr - 8 << "' y='" << mt + 16 + 16 * si
        << "' font-size='12' text-anchor='end' fill='" << detail::kPalette[si % 8] << "'>"
        << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

// values in row-major order: rows vary with y (ny rows of nx cells)
inline void heatmap(const std::string& path, const std::vector<double>& values, int nx, int ny,
                    double xmin, double xmax, double ymin, double ymax,
                    const std::string& xlabel, const std::string& ylabel) {
  if (int(values.size()) != nx * ny) throw std::invalid_argument("heatmap: bad grid size");
  double vmin = 1e300, vmax = -1e300;
  for (double v : values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (vmax <= vmin) vmax = vmin + 1;
  const double w = 640, h = 560, ml = 70, mr = 90, mt = 20, mb = 50;
  const double cw = (w - ml - mr) / nx, ch = (h - mt - mb) / ny;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("heatmap: cannot open " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const double t = (values[iy * nx + ix] - vmin) / (vmax - vmin);
      out << "<rect x='" << detail::num(ml + ix * cw) << "' y='"
          << detail::num(h - mb - (iy + 1) * ch) << "' width='" << detail::num(cw + 0.5)
          << "' height='" << detail::num(ch + 0.5) << "' fill='" << detail::heat_color(t)
          << "'/>\n";
    }
  for (int i = 0; i <= 4; ++i) {
    out << "<text x='" << ml + (w - ml - mr) * i / 4.0 << "' y='" << h - mb + 18
        << "' font-size='11' text-anchor='middle'>"
        << detail::num(xmin + (xmax - xmin) * i / 4.0) << "</text>\n";
    out << "<text x='" << ml - 6 << "' y='" << h - mb - (h - mt - mb) * i / 4.0 + 4
        << "' font-size='11' text-anchor='end'>" << detail::num(ymin + (ymax - ymin) * i / 4.0)
        << "</text>\n";
    out << "<text x='" << w - mr + 46 << "' y='" << h - mb - (h - mt - mb) * i / 4.0 + 4
        << "' font-size='11'>" << detail::num(vmin + (vmax - vmin) * i / 4.0) << "</text>\n";
  }
  for (int i = 0; i < 64; ++i)
    out << "<rect x='" << w - mr + 16 << "' y='" << h - mb - (h - mt - mb) * (i + 1) / 64.0
        << "' width='18' height='" << (h - mt - mb) / 64.0 + 0.5 << "' fill='"
        << detail::heat_color(i / 63.0) << "'/>\n";
  out << "<text x='" << (ml + w - mr) / 2 << "' y='" << h - 10
      << "' font-size='13' text-anchor='middle'>" << xlabel << "</text>\n";
  out << "<text x='16' y='" << (mt + h - mb) / 2 << "' font-size='13' text-anchor='middle' "
      << "transform='rotate(-90 16 " << (mt + h - mb) / 2 << ")'>" << ylabel << "</text>\n";
  out << "</svg>\n";
}

// histogram bars plus overlaid reference curves
inline void histogram(const std::string& path, const std::vector<double>& edges,
                      const std::vector<double>& density, const std::vector<Series>& curves,
                      const std::string& xlabel) {
  if (edges.size() != density.size() + 1) throw std::invalid_argument("histogram: bad edges");
  std::vector<Series> all = curves;
  double ymax = 0.0;
  for (double d : density) ymax = std::max(ymax, d);
  for (const auto& c : curves)
    for (double v : c.y) ymax = std::max(ymax, v);
  const double w = 720, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;
  const double xmin = edges.front(), xmax = edges.back();
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - y / (ymax * 1.05) * (h - mt - mb); };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("histogram: cannot open " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
  for (std::size_t i = 0; i < density.size(); ++i)
    out << "<rect x='" << detail::num(px(edges[i])) << "' y='" << detail::num(py(density[i]))
        << "' width='" << detail::num(px(edges[i + 1]) - px(edges[i])) << "' height='"
        << detail::num(py(0) - py(density[i])) << "' fill='#a6cee3' stroke='#5588aa' "
        << "stroke-width='0.4'/>\n";
  for (std::size_t si = 0; si < all.size(); ++si) {
    const auto& s = all[si];
    out << "<polyline fill='none' stroke='" << detail::kPalette[(si + 1) % 8]
        << "' stroke-width='1.6' stroke-dasharray='6 3' points='";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << detail::num(px(s.x[i])) << "," << detail::num(py(s.y[i])) << " ";
    out << "'/>\n";
    out << "<text x='" << w - mr - 8 << "' y='" << mt + 16 + 16 * si
        << "' font-size='12' text-anchor='end' fill='" << detail::kPalette[(si + 1) % 8] << "'>"
        << s.label << "</text>\n";
  }
  out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
      << "' stroke='black'/>\n";
  out << "<text x='" << (ml + w - mr) / 2 << "' y='" << h - 10
      << "' font-size='13' text-anchor='middle'>" << xlabel << "</text>\n";
  out << "</svg>\n";
}

} // namespace kicktop::svg
