#pragma once

#include "chiralkit/base.hpp"

#include <Eigen/Dense>

#include <utility>

namespace chiralkit {

// A finite projective camera A = [G | t] with invertible G. The center keeps
// the representative (-G^{-1} t, 1); the principal ray is det(G) times the
// third row, which makes its orientation invariant under rescaling A.
class FiniteCamera {
 public:
  explicit FiniteCamera(const Mat34& matrix) : matrix_(matrix) {
    const Mat3 g = matrix_.leftCols<3>();
    det_g_ = g.determinant();
    const double gnorm = g.norm();
    if (!(std::abs(det_g_) > kDetTol * gnorm * gnorm * gnorm))
      throw std::invalid_argument("camera is not finite (singular G block)");
    center_ = Vec4::Ones();
    center_.head<3>() = -g.inverse() * matrix_.col(3);
    ray_ = det_g_ * matrix_.row(2).transpose();
  }

  const Mat34& matrix() const { return matrix_; }
  Mat3 g() const { return matrix_.leftCols<3>(); }
  Vec3 t() const { return matrix_.col(3); }
  double det_g() const { return det_g_; }

  ProjectivePoint center() const { return ProjectivePoint(center_); }
  const Vec4& center_coords() const { return center_; }

  // n_A = det(G) A_{3,.}; the oriented normal of the principal plane.
  const Vec4& principal_ray() const { return ray_; }

 private:
  Mat34 matrix_;
  double det_g_;
  Vec4 center_;
  Vec4 ray_;
};

// An invertible map of P^3. Carries its inverse, last row h, and
// delta = det(H^{-1}); these drive all chirality bookkeeping.
class Homography {
 public:
  explicit Homography(const Mat4& matrix)
      : matrix_(matrix), inverse_(matrix.inverse()) {
    const double det = matrix_.determinant();
    const double n = matrix_.norm();
    if (!(std::abs(det) > kDetTol * n * n * n * n))
      throw std::invalid_argument("homography matrix is singular");
    inv_det_ = 1.0 / det;
  }

  // For maps whose inverse is known in closed form (twisted pairs), avoiding
  // a numerical inversion.
  static Homography from_matrix_and_inverse(const Mat4& matrix,
                                            const Mat4& inverse) {
    Homography h(matrix);
    h.inverse_ = inverse;
    h.inv_det_ = inverse.determinant();
    return h;
  }

  static Homography identity() { return Homography(Mat4::Identity()); }

  const Mat4& matrix() const { return matrix_; }
  const Mat4& inverse() const { return inverse_; }
  Vec4 last_row() const { return matrix_.row(3).transpose(); }
  double inv_det() const { return inv_det_; }

  Vec4 apply(const Vec4& q) const { return matrix_ * q; }

 private:
  Mat4 matrix_;
  Mat4 inverse_;
  double inv_det_;
};

// Signed distance of a finite point along the principal ray,
//   depth(q; A) = (1 / (|det G| ||G_3||)) (n_A^T q) / (n_inf^T q).
// The sign is invariant under rescaling of both q and A.
inline double depth(const ProjectivePoint& q, const FiniteCamera& a,
                    double tol = kDefaultTol) {
  if (!q.is_finite(tol)) throw InfinitePointError();
  if (identified(q, a.center(), tol)) throw CenterPointError();
  const double scale =
      std::abs(a.det_g()) * a.matrix().row(2).head<3>().norm();
  return (a.principal_ray().dot(q.coords())) / (scale * q.coords()[3]);
}

// Sign of (n_A^T q)(n_inf^T q) with a tolerance band; total on P^3.
inline int chirality_sign(const ProjectivePoint& q, const FiniteCamera& a,
                          double tol = kDefaultTol) {
  const double qn = q.coords().lpNorm<Eigen::Infinity>();
  const double value = a.principal_ray().dot(q.coords()) * q.coords()[3];
  const double scale = a.principal_ray().lpNorm<Eigen::Infinity>() * qn * qn;
  return banded_sign(value, scale, tol);
}

// Image of q in A together with the raw third coordinate A_{3,.} q, from
// which callers recover the projective scale data.
inline std::pair<ImagePoint, double> project(const FiniteCamera& a,
                                             const ProjectivePoint& q,
                                             double tol = kDefaultTol) {
  if (identified(q, a.center(), tol)) throw CenterPointError();
  const Vec3 image = a.matrix() * q.coords();
  return {ImagePoint(image), image[2]};
}

// e_ij = A_i c_j, the image of the center of a_j in a_i.
inline ImagePoint epipole(const FiniteCamera& a_i, const FiniteCamera& a_j,
                          double tol = kDefaultTol) {
  if (projectively_equal(a_i.center_coords(), a_j.center_coords(), tol))
    throw CoincidentCentersError();
  return ImagePoint(a_i.matrix() * a_j.center_coords());
}

// The transformed camera A H^{-1}; finite exactly when h^T c_A != 0.
inline FiniteCamera apply_homography(const FiniteCamera& a,
                                     const Homography& h,
                                     double tol = kDefaultTol) {
  const Vec4 hrow = h.last_row();
  const double hc = hrow.dot(a.center_coords());
  if (std::abs(hc) <= tol * hrow.lpNorm<Eigen::Infinity>() *
                          a.center_coords().lpNorm<Eigen::Infinity>())
    throw InfiniteResultCameraError();
  return FiniteCamera(a.matrix() * h.inverse());
}

}  // namespace chiralkit
