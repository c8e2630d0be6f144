#pragma once

#include "chiralkit/arrangement.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace chiralkit {

// One image point per camera, in arrangement order.
struct ImageTuple {
  std::vector<ImagePoint> points;

  ImageTuple() = default;
  explicit ImageTuple(std::vector<ImagePoint> p) : points(std::move(p)) {}
  int size() const { return static_cast<int>(points.size()); }
};

inline bool centers_collinear(const CameraArrangement& arr) {
  if (arr.size() < 2)
    throw std::invalid_argument("collinearity needs at least two cameras");
  return arr.centers_collinear();
}

namespace ji_detail {

// Back-projected direction a = G^{-1} p of an image point.
inline Vec3 back_direction(const FiniteCamera& cam, const ImagePoint& p) {
  return cam.g().inverse() * p.coords();
}

// Baseline direction b_ij = G_i^{-1} t_i - G_j^{-1} t_j.
inline Vec3 baseline_direction(const FiniteCamera& ai, const FiniteCamera& aj) {
  return aj.center_coords().head<3>() - ai.center_coords().head<3>();
}

}  // namespace ji_detail

// The two-view scalar b_ij^T (a_i x a_j); zero for any true correspondence
// off the baseline, and on the baseline because all three vectors align.
inline double epipolar_residual(const FiniteCamera& ai, const FiniteCamera& aj,
                                const ImagePoint& pi, const ImagePoint& pj) {
  const Vec3 a_i = ji_detail::back_direction(ai, pi);
  const Vec3 a_j = ji_detail::back_direction(aj, pj);
  const Vec3 b = ji_detail::baseline_direction(ai, aj);
  return b.dot(a_i.cross(a_j));
}

// The biquadratic inequality system on image tuples. For each ordered pair
// (i, j):
//   det(G_i) p_i3 (a_i x a_j)^T (b_ij x a_j) >= 0
//   det(G_i) det(G_j) p_i3 p_j3 (b_ij x a_i)^T (b_ij x a_j) >= 0
// Every inequality has even degree per image factor, so the test is
// invariant under rescaling any tuple entry.
inline bool ca_satisfied(const CameraArrangement& arr, const ImageTuple& p,
                         double tol = kDefaultTol) {
  const int m = arr.size();
  if (p.size() != m)
    throw std::invalid_argument("tuple length must match the arrangement");
  std::vector<Vec3> a(m);
  for (int i = 0; i < m; ++i)
    a[i] = ji_detail::back_direction(arr.camera(i), p.points[i]);

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const Vec3 b = ji_detail::baseline_direction(arr.camera(i), arr.camera(j));
      const double di = arr.camera(i).det_g();
      const double pi3 = p.points[i][2];
      const double v1 = di * pi3 * (a[i].cross(a[j])).dot(b.cross(a[j]));
      const double s1 = std::abs(di) * p.points[i].coords().norm() *
                        a[i].norm() * a[j].norm() * a[j].norm() * b.norm();
      if (banded_sign(v1, s1, tol) < 0) return false;
      if (j > i) {
        const double dj = arr.camera(j).det_g();
        const double pj3 = p.points[j][2];
        const double v2 =
            di * dj * pi3 * pj3 * (b.cross(a[i])).dot(b.cross(a[j]));
        const double s2 = std::abs(di * dj) * p.points[i].coords().norm() *
                          p.points[j].coords().norm() * b.norm() * b.norm() *
                          a[i].norm() * a[j].norm();
        if (banded_sign(v2, s2, tol) < 0) return false;
      }
    }
  }
  return true;
}

struct TriangulationResult {
  ProjectivePoint point;
  double residual = 0.0;       // normalized smallest singular value
  bool rank_deficient = false; // stacked system has rank < 3 (baseline tuples)
};

// Least-squares homogeneous solution of the stacked equations
// p_i x (A_i q) = 0. Joint-image membership is declared when the residual is
// at most tol_tri; rank deficiency is reported, not thrown, because epipole
// tuples legitimately solve the system along the whole baseline.
inline TriangulationResult triangulate(const CameraArrangement& arr,
                                       const ImageTuple& p) {
  const int m = arr.size();
  if (m < 2) throw std::invalid_argument("triangulation needs two cameras");
  if (p.size() != m)
    throw std::invalid_argument("tuple length must match the arrangement");

  Eigen::MatrixXd stacked(3 * m, 4);
  for (int i = 0; i < m; ++i) {
    const Vec3 v = p.points[i].coords() / p.points[i].coords().norm();
    Mat3 cross;
    cross << 0, -v[2], v[1], v[2], 0, -v[0], -v[1], v[0], 0;
    const Mat34& a = arr.camera(i).matrix();
    stacked.middleRows<3>(3 * i) = (cross * a) / a.norm();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  return {ProjectivePoint(Vec4(svd.matrixV().col(3))), s[3] / s[0],
          s[2] <= kRankTol * s[0]};
}

enum class EpipoleSetLabel { EppPlusPlus, EZero, Excluded };

// Per-center classification behind the epipole part of the chiral joint
// image: a center with positive depth in every other camera contributes all
// of E_j; one in the domain with a zero depth contributes boundary tuples;
// the rest are excluded.
inline std::vector<EpipoleSetLabel> classify_epipole_sets(
    const CameraArrangement& arr, double tol = kDefaultTol) {
  if (arr.nonempty_certificate().status != FeasibilityStatus::StrictlyFeasible)
    throw DomainEmptyError();
  const int m = arr.size();
  if (m < 2) return {};  // no pairs, nothing to classify
  std::vector<EpipoleSetLabel> labels;
  labels.reserve(m);
  for (int j = 0; j < m; ++j) {
    const ProjectivePoint cj = arr.camera(j).center();
    bool all_positive = true;
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      if (chirality_sign(cj, arr.camera(i), tol) <= 0) all_positive = false;
    }
    if (all_positive) {
      labels.push_back(EpipoleSetLabel::EppPlusPlus);
    } else if (contains(arr, cj, tol) != DomainStatus::Outside) {
      labels.push_back(EpipoleSetLabel::EZero);
    } else {
      labels.push_back(EpipoleSetLabel::Excluded);
    }
  }
  return labels;
}

enum class CjiStatus { ChiralMember, EpipolePositive, BaselinePoint, NonMember };
enum class EpipoleSubtag { PlusPlus, Zero };

struct CjiClassification {
  CjiStatus status = CjiStatus::NonMember;
  std::optional<ProjectivePoint> witness;    // triangulated point
  std::optional<int> epipole_center;         // j of the matched E_j form
  std::optional<EpipoleSubtag> subtag;
  double residual = 0.0;
};

namespace ji_detail {

// Indices j such that every slot i != j matches the epipole e_ij.
inline std::vector<int> epipole_form_matches(const CameraArrangement& arr,
                                             const ImageTuple& p, double tol) {
  std::vector<int> matches;
  for (int j = 0; j < arr.size(); ++j) {
    bool ok = true;
    for (int i = 0; i < arr.size() && ok; ++i) {
      if (i == j) continue;
      ok = identified(p.points[i], arr.epipole(i, j), tol);
    }
    if (ok) matches.push_back(j);
  }
  return matches;
}

}  // namespace ji_detail

// Membership in the closure of the chiral joint image intersected with the
// C_A system: joint-image membership via triangulation, chirality via
// ca_satisfied, epipole-form tuples labeled through classify_epipole_sets,
// and the image of a common baseline reported as its own status. A tuple
// matching two epipole forms is necessarily that baseline image.
inline CjiClassification chiral_joint_image_member(const CameraArrangement& arr,
                                                   const ImageTuple& p,
                                                   double tol = kDefaultTol) {
  if (arr.nonempty_certificate().status != FeasibilityStatus::StrictlyFeasible)
    throw DomainEmptyError();
  if (p.size() != arr.size())
    throw std::invalid_argument("tuple length must match the arrangement");

  CjiClassification out;
  const auto matches = ji_detail::epipole_form_matches(arr, p, tol);
  if (matches.size() >= 2) {
    out.status = CjiStatus::BaselinePoint;
    return out;
  }
  if (matches.size() == 1) {
    const int j = matches.front();
    const auto labels = classify_epipole_sets(arr, tol);
    out.epipole_center = j;
    switch (labels[j]) {
      case EpipoleSetLabel::EppPlusPlus:
        out.status = CjiStatus::EpipolePositive;
        out.subtag = EpipoleSubtag::PlusPlus;
        break;
      case EpipoleSetLabel::EZero:
        out.status = CjiStatus::EpipolePositive;
        out.subtag = EpipoleSubtag::Zero;
        break;
      case EpipoleSetLabel::Excluded:
        out.status = CjiStatus::NonMember;
        break;
    }
    return out;
  }

  const auto tri = triangulate(arr, p);
  out.residual = tri.residual;
  if (tri.rank_deficient || tri.residual > kTriangulationTol) {
    out.status = CjiStatus::NonMember;
    return out;
  }
  if (!ca_satisfied(arr, p, tol)) {
    out.status = CjiStatus::NonMember;
    return out;
  }
  out.status = CjiStatus::ChiralMember;
  out.witness = tri.point;
  return out;
}

}  // namespace chiralkit
