#pragma once

#include "chiralkit/chiralkit.hpp"

#include <optional>
#include <vector>

// Shared fixtures, random generators, and definition-level oracles. The
// oracles stay independent of the library code paths they check.
namespace support {

using namespace chiralkit;

// --- fixtures ---------------------------------------------------------------

// Identity pair with baseline direction (1,1,1).
inline CameraArrangement identity_pair() {
  Mat34 a1, a2;
  a1 << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0;
  a2 << 1, 0, 0, 1, 0, 1, 0, 1, 0, 0, 1, 1;
  return CameraArrangement({FiniteCamera(a1), FiniteCamera(a2)});
}

// Opposite-facing pair; its chiral domain is empty.
inline Mat34 train_second_camera() {
  Mat34 a2;
  a2 << 1, 0, 0, 0, 0, -1, 0, 1, 0, 0, -1, 0;
  return a2;
}

inline CameraArrangement train_pair() {
  Mat34 a1;
  a1 << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0;
  return CameraArrangement({FiniteCamera(a1), FiniteCamera(train_second_camera())});
}

// The signed-but-not-upgradable three-view fixture with two world points.
struct ThreeViewGap {
  CameraArrangement arrangement;
  std::vector<Vec4> points;
};

inline ThreeViewGap three_view_gap() {
  Mat34 a1, a2, a3;
  a1 << 0, 0, -1, -1, 0, 1, 0, 1, 1, 0, 0, 0;
  a2 << 1, 0, 0, -1, 0, 0, -1, 1, 0, 1, 0, 0;
  a3 << 1, 0, 0, 1, 0, 1, 0, -1, 0, 0, 1, 0;
  return {CameraArrangement({FiniteCamera(a1), FiniteCamera(a2), FiniteCamera(a3)}),
          {Vec4(1, 1, 2, -6), Vec4(1, 1, 2, 6)}};
}

// --- random generators ------------------------------------------------------

inline Mat3 random_rotation(TrialRng& rng) {
  // Unit quaternion sampled from 4 gaussians.
  Vec4 q;
  for (int i = 0; i < 4; ++i) q[i] = rng.gaussian();
  q.normalize();
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

inline FiniteCamera random_camera(TrialRng& rng) {
  for (;;) {
    Mat34 m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = rng.uniform(-2.0, 2.0);
    const Mat3 g = m.leftCols<3>();
    if (std::abs(g.determinant()) < 0.05) continue;
    return FiniteCamera(m);
  }
}

inline EuclideanCamera random_euclidean_camera(TrialRng& rng,
                                               double min_translation = 0.2) {
  for (;;) {
    const Mat3 r = random_rotation(rng);
    Vec3 t(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    if (t.norm() < min_translation) continue;
    return EuclideanCamera(r, t);
  }
}

inline CameraArrangement random_arrangement(TrialRng& rng, int m) {
  for (;;) {
    std::vector<FiniteCamera> cams;
    for (int i = 0; i < m; ++i) cams.push_back(random_camera(rng));
    try {
      return CameraArrangement(std::move(cams));
    } catch (const CoincidentCentersError&) {
    }
  }
}

inline CameraArrangement random_nonempty_arrangement(TrialRng& rng, int m) {
  for (;;) {
    auto arr = random_arrangement(rng, m);
    if (is_nonempty(arr).first) return arr;
  }
}

// A finite point with strictly positive depth in every camera, found by
// rejection around the nonemptiness witness.
inline ProjectivePoint random_interior_point(TrialRng& rng,
                                             const CameraArrangement& arr,
                                             double margin = 1e-4) {
  const auto [nonempty, witness] = is_nonempty(arr);
  if (!nonempty) throw std::logic_error("arrangement has an empty domain");
  for (;;) {
    Vec4 q = witness->coords();
    for (int i = 0; i < 3; ++i) q[i] += rng.uniform(-2.0, 2.0);
    q /= q[3];
    bool ok = true;
    for (int i = 0; i < arr.size() && ok; ++i)
      ok = arr.ray(i).dot(q) > margin * arr.ray(i).norm() * q.norm();
    if (ok) return ProjectivePoint(q);
  }
}

// --- independent oracles ----------------------------------------------------

// Depth as the projection of the dehomogenized offset onto the unit
// principal-ray direction in R^3.
inline double depth_oracle(const ProjectivePoint& q, const FiniteCamera& a) {
  const Vec3 offset = q.dehomogenized() - a.center().dehomogenized();
  const Vec3 direction =
      (a.det_g() > 0 ? 1.0 : -1.0) * a.matrix().row(2).head<3>().transpose();
  return direction.normalized().dot(offset);
}

// Grid scan over unit 4-vectors for a strict point of a feasibility problem;
// reports the best margin found. Resolution matches the desk-scale spec.
struct GridScan {
  bool found = false;
  double margin = 0.0;
  Vec4 y = Vec4::Zero();
};

inline GridScan grid_feasibility(const FeasibilityProblem& p,
                                 double resolution = 0.05) {
  GridScan best;
  const int k = static_cast<int>(std::round(1.0 / resolution));
  Vec4 y;
  for (int a = -k; a <= k; ++a)
    for (int b = -k; b <= k; ++b)
      for (int c = -k; c <= k; ++c)
        for (int d = -k; d <= k; ++d) {
          y << a, b, c, d;
          if (y.norm() < 0.5) continue;
          y /= y.norm();
          bool eq_ok = true;
          for (const auto& e : p.eq_rows())
            eq_ok = eq_ok && std::abs(e.dot(y)) <= 1e-9;
          if (!eq_ok) continue;
          double margin = 1e300;
          for (const auto& w : p.strict_rows())
            margin = std::min(margin, w.dot(y) / w.norm());
          for (const auto& u : p.weak_rows())
            if (u.dot(y) < 0.0) margin = -1.0;
          if (margin > best.margin) best = {true, margin, y};
        }
  return best;
}

}  // namespace support
