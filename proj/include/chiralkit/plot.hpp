#pragma once

#include "chiralkit/joint_image.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace chiralkit {

// Data behind the two-view chiral joint image figure: for a fixed point in
// the first image, the epipolar line in the second image, the three C_A
// inequality values along it, and the sub-segments where all of them hold.
struct CjiPlotSample {
  double t = 0.0;  // arc length along the line
  Vec2 xy = Vec2::Zero();
  std::array<double, 3> values{};  // the three C_A inequalities at this point
  bool inside = false;
};

struct CjiPlot {
  Vec3 line = Vec3::Zero();        // epipolar line coefficients in image 2
  Vec2 direction = Vec2::Zero();   // unit direction of the affine line
  Vec2 base = Vec2::Zero();        // point of the line closest to the origin
  std::vector<CjiPlotSample> samples;
  std::vector<double> boundaries;  // arc-length positions of sign changes
  std::vector<std::pair<double, double>> solid;  // t-intervals inside C_A
  double window = 10.0;
};

namespace plot_detail {

// The three C_A inequality values for the pair, at image-2 point (x, y, 1).
inline std::array<double, 3> ca_values(const CameraArrangement& arr,
                                       const ImagePoint& p1, double x,
                                       double y) {
  const Vec3 a1 = ji_detail::back_direction(arr.camera(0), p1);
  const Vec3 a2 = ji_detail::back_direction(arr.camera(1), ImagePoint(x, y, 1.0));
  const Vec3 b = ji_detail::baseline_direction(arr.camera(0), arr.camera(1));
  const double d1 = arr.camera(0).det_g();
  const double d2 = arr.camera(1).det_g();
  return {d1 * p1[2] * (a1.cross(a2)).dot(b.cross(a2)),
          d2 * 1.0 * (a1.cross(a2)).dot(b.cross(a1)),
          d1 * d2 * p1[2] * 1.0 * (b.cross(a1)).dot(b.cross(a2))};
}

inline bool all_nonneg(const std::array<double, 3>& v) {
  return v[0] >= 0.0 && v[1] >= 0.0 && v[2] >= 0.0;
}

}  // namespace plot_detail

// Samples the epipolar line of p1 inside [-window, window]^2 and locates the
// boundary points of the chiral segment by bisection on each inequality's
// sign changes.
inline CjiPlot compute_cji_plot(const CameraArrangement& arr,
                                const ImagePoint& p1, double window = 10.0,
                                int sample_count = 2001) {
  if (arr.size() != 2)
    throw std::invalid_argument("the joint image plot needs two cameras");
  CjiPlot plot;
  plot.window = window;

  const Vec3 a1 = ji_detail::back_direction(arr.camera(0), p1);
  const Vec3 b = ji_detail::baseline_direction(arr.camera(0), arr.camera(1));
  const Vec3 bxa1 = b.cross(a1);
  if (bxa1.norm() < 1e-12 * b.norm() * a1.norm())
    throw std::invalid_argument("first image point is the epipole");
  plot.line = arr.camera(1).g().transpose().inverse() * bxa1;

  const double nn = plot.line.head<2>().norm();
  if (nn < 1e-12)
    throw std::invalid_argument("epipolar line is at infinity in image 2");
  plot.direction = Vec2(plot.line[1], -plot.line[0]) / nn;
  plot.base = -plot.line[2] * plot.line.head<2>() / (nn * nn);

  // Parameter range covering the window with some slack.
  const double reach = window * 2.0 + plot.base.norm();
  auto point_at = [&](double t) { return Vec2(plot.base + t * plot.direction); };
  auto values_at = [&](double t) {
    const Vec2 p = point_at(t);
    return plot_detail::ca_values(arr, p1, p[0], p[1]);
  };

  const double t0 = -reach, t1 = reach;
  const double dt = (t1 - t0) / (sample_count - 1);
  plot.samples.reserve(sample_count);
  for (int s = 0; s < sample_count; ++s) {
    const double t = t0 + s * dt;
    CjiPlotSample sample;
    sample.t = t;
    sample.xy = point_at(t);
    sample.values = values_at(t);
    sample.inside = plot_detail::all_nonneg(sample.values);
    plot.samples.push_back(sample);
  }

  // Bisect each inequality's sign changes to pin the boundary positions.
  for (int ineq = 0; ineq < 3; ++ineq) {
    for (int s = 1; s < sample_count; ++s) {
      double lo = plot.samples[s - 1].t, hi = plot.samples[s].t;
      double flo = plot.samples[s - 1].values[ineq];
      double fhi = plot.samples[s].values[ineq];
      if (flo == 0.0 || (flo < 0) == (fhi < 0)) continue;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = values_at(mid)[ineq];
        if ((fmid < 0) == (flo < 0)) {
          lo = mid;
          flo = fmid;
        } else {
          hi = mid;
          fhi = fmid;
        }
      }
      plot.boundaries.push_back(0.5 * (lo + hi));
    }
  }
  std::sort(plot.boundaries.begin(), plot.boundaries.end());

  // Merge consecutive inside samples into solid intervals.
  int run_start = -1;
  for (int s = 0; s < sample_count; ++s) {
    if (plot.samples[s].inside && run_start < 0) run_start = s;
    if ((!plot.samples[s].inside || s == sample_count - 1) && run_start >= 0) {
      const int run_end = plot.samples[s].inside ? s : s - 1;
      plot.solid.emplace_back(plot.samples[run_start].t,
                              plot.samples[run_end].t);
      run_start = -1;
    }
  }
  return plot;
}

namespace plot_detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace plot_detail

// Deterministic SVG: fixed viewBox over [-window, window]^2, three shaded
// inequality regions rasterized as scanline strips, the epipolar line dashed,
// and the chiral segment solid. No timestamps, so golden-file comparison
// works.
inline void write_cji_svg(const CjiPlot& plot, const CameraArrangement& arr,
                          const ImagePoint& p1, const std::string& path) {
  const double w = plot.window;
  const int size = 640;
  auto sx = [&](double x) { return (x + w) / (2 * w) * size; };
  auto sy = [&](double y) { return (w - y) / (2 * w) * size; };

  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << " " << size
      << "\">\n";
  out << "<rect width=\"" << size << "\" height=\"" << size
      << "\" fill=\"white\"/>\n";

  // Region shading: per scanline, x-runs where each inequality holds.
  const char* colors[3] = {"#d62728", "#2ca02c", "#9467bd"};
  const int rows = 160, cols = 160;
  for (int ineq = 0; ineq < 3; ++ineq) {
    out << "<g fill=\"" << colors[ineq] << "\" fill-opacity=\"0.12\">\n";
    for (int r = 0; r < rows; ++r) {
      const double y = -w + (r + 0.5) * (2 * w / rows);
      int run = -1;
      for (int c = 0; c <= cols; ++c) {
        const double x = -w + (c + 0.5) * (2 * w / cols);
        const bool in =
            c < cols &&
            plot_detail::ca_values(arr, p1, x, y)[ineq] >= 0.0;
        if (in && run < 0) run = c;
        if (!in && run >= 0) {
          const double x0 = -w + (run + 0.5) * (2 * w / cols);
          const double x1 = -w + (c - 0.5) * (2 * w / cols);
          out << "<rect x=\"" << plot_detail::fmt(sx(x0)) << "\" y=\""
              << plot_detail::fmt(sy(y) - 0.5 * size / rows) << "\" width=\""
              << plot_detail::fmt(std::max(1.0, sx(x1) - sx(x0))) << "\" height=\""
              << plot_detail::fmt(1.0 * size / rows) << "\"/>\n";
          run = -1;
        }
      }
    }
    out << "</g>\n";
  }

  // Dashed epipolar line across the whole window.
  const double reach = w * 2.0 + plot.base.norm();
  const Vec2 e0 = plot.base - reach * plot.direction;
  const Vec2 e1 = plot.base + reach * plot.direction;
  out << "<line x1=\"" << plot_detail::fmt(sx(e0[0])) << "\" y1=\""
      << plot_detail::fmt(sy(e0[1])) << "\" x2=\"" << plot_detail::fmt(sx(e1[0]))
      << "\" y2=\"" << plot_detail::fmt(sy(e1[1]))
      << "\" stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"6 5\"/>\n";

  // Solid chiral segments.
  for (const auto& [ta, tb] : plot.solid) {
    const Vec2 s0 = plot.base + ta * plot.direction;
    const Vec2 s1 = plot.base + tb * plot.direction;
    out << "<line x1=\"" << plot_detail::fmt(sx(s0[0])) << "\" y1=\""
        << plot_detail::fmt(sy(s0[1])) << "\" x2=\""
        << plot_detail::fmt(sx(s1[0])) << "\" y2=\""
        << plot_detail::fmt(sy(s1[1]))
        << "\" stroke=\"black\" stroke-width=\"4\"/>\n";
  }
  out << "</svg>\n";
}

// CSV of the line samples: t, x, y, the three inequality values, and the
// inside flag. Boundary rows are re-emitted at the bisected positions.
inline void write_cji_csv(const CjiPlot& plot, const CameraArrangement& arr,
                          const ImagePoint& p1, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "kind,t,x,y,value1,value2,value3,inside\n";
  char buf[256];
  for (const auto& s : plot.samples) {
    std::snprintf(buf, sizeof(buf),
                  "sample,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", s.t,
                  s.xy[0], s.xy[1], s.values[0], s.values[1], s.values[2],
                  s.inside ? 1 : 0);
    out << buf;
  }
  for (double t : plot.boundaries) {
    const Vec2 p = plot.base + t * plot.direction;
    const auto v = plot_detail::ca_values(arr, p1, p[0], p[1]);
    std::snprintf(buf, sizeof(buf),
                  "boundary,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", t, p[0],
                  p[1], v[0], v[1], v[2],
                  plot_detail::all_nonneg(v) ? 1 : 0);
    out << buf;
  }
}

}  // namespace chiralkit
