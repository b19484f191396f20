#include "fmd/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace fmd {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

// Linear blend from sea green (deep) to ochre (shallow).
std::string depth_color(double unit_depth) {
  const double u = std::clamp(unit_depth, 0.0, 1.0);
  const int r = static_cast<int>(204 + (46 - 204) * u);
  const int g = static_cast<int>(119 + (139 - 119) * u);
  const int b = static_cast<int>(34 + (87 - 34) * u);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string render_boxplot_svg(const FunctionalSample& sample, const BoxplotSummary& box,
                               int width, int height) {
  const Index n = sample.n();
  const Index p = sample.p();
  const double margin = 40.0;

  double y_min = sample.curves.minCoeff();
  double y_max = sample.curves.maxCoeff();
  if (!(y_max > y_min)) {
    y_min -= 1.0;
    y_max += 1.0;
  }
  const double x_min = sample.grid.points(0);
  const double x_max = sample.grid.points(p - 1);

  auto sx = [&](double t) {
    return margin + (t - x_min) / (x_max - x_min) * (width - 2.0 * margin);
  };
  auto sy = [&](double v) {
    return height - margin - (v - y_min) / (y_max - y_min) * (height - 2.0 * margin);
  };
  auto polyline_points = [&](const Curve& values) {
    std::ostringstream pts;
    for (Index i = 0; i < p; ++i) {
      if (i) pts << ' ';
      pts << fmt(sx(sample.grid.points(i))) << ',' << fmt(sy(values(i)));
    }
    return pts.str();
  };

  double depth_lo = box.depths.empty() ? 0.0 : box.depths[0];
  double depth_hi = depth_lo;
  for (double d : box.depths) {
    depth_lo = std::min(depth_lo, d);
    depth_hi = std::max(depth_hi, d);
  }
  const double depth_span = depth_hi > depth_lo ? depth_hi - depth_lo : 1.0;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

  // Central band behind everything else.
  svg << "<polygon class=\"central-band\" fill=\"#b8cfe6\" fill-opacity=\"0.6\" stroke=\"none\" "
         "points=\"";
  for (Index i = 0; i < p; ++i)
    svg << fmt(sx(sample.grid.points(i))) << ',' << fmt(sy(box.central_lower(i))) << ' ';
  for (Index i = p - 1; i >= 0; --i)
    svg << fmt(sx(sample.grid.points(i))) << ',' << fmt(sy(box.central_upper(i))) << ' ';
  svg << "\"/>\n";

  std::vector<bool> is_outlier(static_cast<size_t>(n), false);
  for (Index i : box.outlier_indices) is_outlier[static_cast<size_t>(i)] = true;

  for (Index i = 0; i < n; ++i) {
    if (is_outlier[static_cast<size_t>(i)] || i == box.median_index) continue;
    const double u = (box.depths[static_cast<size_t>(i)] - depth_lo) / depth_span;
    svg << "<polyline class=\"curve\" fill=\"none\" stroke=\"" << depth_color(u)
        << "\" stroke-width=\"0.8\" stroke-opacity=\"0.65\" points=\""
        << polyline_points(sample.curve(i)) << "\"/>\n";
  }

  for (const Curve* whisker : {&box.whisker_lower, &box.whisker_upper})
    svg << "<polyline class=\"whisker\" fill=\"none\" stroke=\"#1f3552\" stroke-width=\"1.6\" "
           "points=\""
        << polyline_points(*whisker) << "\"/>\n";

  svg << "<polyline class=\"median\" fill=\"none\" stroke=\"#0b0b0b\" stroke-width=\"2.4\" "
         "points=\""
      << polyline_points(sample.curve(box.median_index)) << "\"/>\n";

  for (Index i : box.outlier_indices)
    svg << "<polyline class=\"outlier\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.4\" "
           "stroke-dasharray=\"6,3\" points=\""
        << polyline_points(sample.curve(i)) << "\"/>\n";

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace fmd
