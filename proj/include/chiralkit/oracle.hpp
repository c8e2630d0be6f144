#pragma once

#include "chiralkit/reconstruction.hpp"

#include <cstdint>
#include <optional>

namespace chiralkit {

// Deterministic counter-based randomness: every draw is a pure function of
// (seed, trial index, draw counter), so reports are bit-reproducible and
// independent of any threading of the trial space.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t index)
      : state_(mix(seed ^ mix(index + 0x9e3779b97f4a7c15ULL))) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller.
  double gaussian() {
    double u = uniform();
    while (u <= 1e-300) u = uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
  }

  Vec4 unit_sphere_point() {
    Vec4 v;
    do {
      for (int i = 0; i < 4; ++i) v[i] = gaussian();
    } while (v.norm() < 1e-6);
    return v / v.norm();
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

struct SampleReport {
  long trials = 0;
  long agreements = 0;
  double max_violation = 0.0;
  std::uint64_t seed = 0;
};

namespace oracle_detail {

// Sampling margin: samples whose defining quantities fall inside this band
// are boundary cases for both routes and are redrawn.
inline constexpr double kMarginBand = 1e-6;
inline constexpr int kRedrawCap = 256;

// Two interleaved streams: points uniform on the representative 3-sphere and
// a finite-biased stream with q4 = 1 and coordinates in [-10, 10].
inline Vec4 draw_point(TrialRng& rng, long index) {
  if (index % 2 == 0) return rng.unit_sphere_point();
  Vec4 q(rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0),
         rng.uniform(-10.0, 10.0), 1.0);
  return q / q.norm();
}

inline bool outside_band(double value, double scale) {
  return std::abs(value) > kMarginBand * std::max(scale, 1e-12);
}

// Distance of the unit vector q from the 2-plane spanned by the centers of
// cameras i and j.
inline double baseline_distance(const CameraArrangement& arr, int i, int j,
                                const Vec4& q) {
  Vec4 u = arr.center(i).normalized();
  Vec4 w = arr.center(j) - arr.center(j).dot(u) * u;
  w.normalize();
  const Vec4 residual = q - q.dot(u) * u - q.dot(w) * w;
  return residual.norm();
}

}  // namespace oracle_detail

// Definition-level check of the chiral domain description: strict depth
// positivity in every camera (the definition) against the Interior
// classification of the quadratic system. Samples inside the tolerance band
// of any factor are redrawn; disagreements are counted and the largest
// disagreeing margin reported.
inline SampleReport domain_agreement(const CameraArrangement& arr, long trials,
                                     std::uint64_t seed,
                                     double tol = kDefaultTol) {
  if (arr.nonempty_certificate().status != FeasibilityStatus::StrictlyFeasible)
    throw DomainEmptyError();
  SampleReport report;
  report.trials = trials;
  report.seed = seed;
  for (long t = 0; t < trials; ++t) {
    TrialRng rng(seed, static_cast<std::uint64_t>(t));
    bool usable = false;
    Vec4 q;
    for (int attempt = 0; attempt < oracle_detail::kRedrawCap && !usable;
         ++attempt) {
      q = oracle_detail::draw_point(rng, t);
      usable = oracle_detail::outside_band(q[3], 1.0);
      for (int i = 0; i < arr.size() && usable; ++i)
        usable = oracle_detail::outside_band(arr.ray(i).dot(q),
                                             arr.ray(i).norm());
    }
    if (!usable) {  // boundary-saturated geometry; count as vacuous agreement
      ++report.agreements;
      continue;
    }
    const ProjectivePoint p(q);
    bool definition = true;
    double worst = 1e300;
    for (int i = 0; i < arr.size(); ++i) {
      const double d = depth(p, arr.camera(i), tol);
      definition = definition && d > 0.0;
      worst = std::min(worst, std::abs(d));
    }
    const bool closed_form = contains(arr, p, tol) == DomainStatus::Interior;
    if (definition == closed_form) {
      ++report.agreements;
    } else {
      report.max_violation = std::max(report.max_violation, worst);
    }
  }
  return report;
}

// Definition-level check of the chiral joint image description: project a
// sampled world point and compare ca_satisfied on its images against chiral
// domain membership of the point itself. Points near a baseline are redrawn,
// matching the set difference in the collinear statement.
inline SampleReport ca_vs_projection(const CameraArrangement& arr, long trials,
                                     std::uint64_t seed,
                                     double tol = kDefaultTol) {
  if (arr.nonempty_certificate().status != FeasibilityStatus::StrictlyFeasible)
    throw DomainEmptyError();
  SampleReport report;
  report.trials = trials;
  report.seed = seed;
  const int m = arr.size();
  for (long t = 0; t < trials; ++t) {
    TrialRng rng(seed, static_cast<std::uint64_t>(t));
    bool usable = false;
    Vec4 q;
    for (int attempt = 0; attempt < oracle_detail::kRedrawCap && !usable;
         ++attempt) {
      q = oracle_detail::draw_point(rng, t);
      usable = oracle_detail::outside_band(q[3], 1.0);
      for (int i = 0; i < m && usable; ++i)
        usable = oracle_detail::outside_band(arr.ray(i).dot(q),
                                             arr.ray(i).norm());
      for (int i = 0; i < m && usable; ++i)
        for (int j = i + 1; j < m && usable; ++j)
          usable = oracle_detail::baseline_distance(arr, i, j, q) > 1e-3;
    }
    if (!usable) {
      ++report.agreements;
      continue;
    }
    const ProjectivePoint p(q);
    std::vector<ImagePoint> images;
    images.reserve(m);
    for (int i = 0; i < m; ++i)
      images.push_back(project(arr.camera(i), p, tol).first);
    const bool image_side = ca_satisfied(arr, ImageTuple(std::move(images)), tol);
    const bool world_side = contains(arr, p, tol) != DomainStatus::Outside;
    if (image_side == world_side) {
      ++report.agreements;
    } else {
      double worst = 1e300;
      for (int i = 0; i < m; ++i)
        worst = std::min(worst, std::abs(arr.ray(i).dot(q)));
      report.max_violation = std::max(report.max_violation, worst);
    }
  }
  return report;
}

// Brute-force companion to the chiral upgrade: scans unit 4-vectors h on a
// lattice of the given resolution for membership in either cone system and
// returns the best hit. The agreement contract with the LP holds outside a
// 2 x resolution margin band in both directions.
inline std::optional<Vec4> upgrade_grid_search(const SignedReconstruction& sr,
                                               double resolution = 0.05) {
  const auto& arr = sr.reconstruction.arrangement();
  const int m = arr.size();
  std::vector<Vec4> centers(m);
  for (int i = 0; i < m; ++i)
    centers[i] = (sr.sigma[i] * arr.center(i)).normalized();
  std::vector<Vec4> points;
  points.reserve(sr.reconstruction.world_points().size());
  for (const auto& q : sr.reconstruction.world_points())
    points.push_back(q.normalized());

  const int k = static_cast<int>(std::round(1.0 / resolution));
  std::optional<Vec4> best;
  double best_margin = 0.0;
  Vec4 h;
  for (int a = -k; a <= k; ++a)
    for (int b = -k; b <= k; ++b)
      for (int c = -k; c <= k; ++c)
        for (int d = -k; d <= k; ++d) {
          h << a, b, c, d;
          const double norm = h.norm();
          if (norm < 0.5) continue;
          h /= norm;
          double center_margin = 1e300;
          for (const auto& sc : centers)
            center_margin = std::min(center_margin, h.dot(sc));
          double point_margin = 1e300;
          if (center_margin > 0.0) {
            for (const auto& q : points)
              point_margin = std::min(point_margin, h.dot(q));
          } else {
            center_margin = 1e300;
            for (const auto& sc : centers)
              center_margin = std::min(center_margin, -h.dot(sc));
            if (center_margin <= 0.0) continue;
            for (const auto& q : points)
              point_margin = std::min(point_margin, h.dot(q));
          }
          if (center_margin <= 0.0 || point_margin < 0.0) continue;
          const double margin = std::min(center_margin, point_margin);
          if (!best || margin > best_margin) {
            best = h;
            best_margin = margin;
          }
        }
  return best;
}

}  // namespace chiralkit
