#pragma once

#include "chiralkit/camera.hpp"
#include "chiralkit/lp.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace chiralkit {

// An ordered list of finite cameras with pairwise distinct centers. Caches
// the principal rays, centers, the 4 x (m+1) ray matrix [n_1 .. n_m n_inf],
// the pairwise epipoles, the collinearity flag, and the nonemptiness
// certificate of the chiral domain.
class CameraArrangement {
 public:
  explicit CameraArrangement(std::vector<FiniteCamera> cameras,
                             double tol = kDefaultTol)
      : cameras_(std::move(cameras)) {
    if (cameras_.empty())
      throw std::invalid_argument("arrangement needs at least one camera");
    const int m = static_cast<int>(cameras_.size());
    rays_.reserve(m);
    centers_.reserve(m);
    for (const auto& cam : cameras_) {
      rays_.push_back(cam.principal_ray());
      centers_.push_back(cam.center_coords());
    }
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (projectively_equal(centers_[i], centers_[j], tol))
          throw CoincidentCentersError();

    epipoles_.assign(m, std::vector<std::optional<ImagePoint>>(m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j)
          epipoles_[i][j] = chiralkit::epipole(cameras_[i], cameras_[j], tol);

    collinear_ = compute_collinear(tol);

    std::vector<Vec4> columns(rays_.begin(), rays_.end());
    columns.push_back(infinity_normal());
    nonempty_certificate_ = rowspace_meets_positive_orthant(columns, tol);
  }

  int size() const { return static_cast<int>(cameras_.size()); }
  const std::vector<FiniteCamera>& cameras() const { return cameras_; }
  const FiniteCamera& camera(int i) const { return cameras_[i]; }
  const Vec4& ray(int i) const { return rays_[i]; }
  const Vec4& center(int i) const { return centers_[i]; }
  const ImagePoint& epipole(int i, int j) const { return *epipoles_[i][j]; }

  // Columns n_1, ..., n_m, n_inf.
  std::vector<Vec4> ray_columns() const {
    std::vector<Vec4> columns(rays_.begin(), rays_.end());
    columns.push_back(infinity_normal());
    return columns;
  }

  bool centers_collinear() const { return collinear_; }
  const FeasibilityResult& nonempty_certificate() const {
    return nonempty_certificate_;
  }

 private:
  // Rank of the 4 x m matrix of center representatives, <= 2 means all
  // centers lie on one projective line.
  bool compute_collinear(double /*tol*/) const {
    const int m = size();
    if (m <= 2) return true;
    Eigen::MatrixXd c(4, m);
    for (int i = 0; i < m; ++i) c.col(i) = centers_[i];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
    const auto& s = svd.singularValues();
    return s.size() < 3 || s[2] <= kRankTol * s[0];
  }

  std::vector<FiniteCamera> cameras_;
  std::vector<Vec4> rays_;
  std::vector<Vec4> centers_;
  std::vector<std::vector<std::optional<ImagePoint>>> epipoles_;
  bool collinear_ = false;
  FeasibilityResult nonempty_certificate_;
};

enum class DomainStatus { Interior, Boundary, Outside, DomainEmpty };

// Nonemptiness of the chiral domain: the row space of [n_1 .. n_m n_inf] must
// meet the strictly positive orthant. The witness is a finite point with
// positive depth in every camera, normalized to q_4 = 1.
inline std::pair<bool, std::optional<ProjectivePoint>> is_nonempty(
    const CameraArrangement& arr, double tol = kDefaultTol) {
  const auto& cert = arr.nonempty_certificate();
  if (cert.status != FeasibilityStatus::StrictlyFeasible) return {false, {}};
  Vec4 q = *cert.witness;
  if (std::abs(q[3]) > tol) q /= q[3];
  ProjectivePoint witness(q);
  for (int i = 0; i < arr.size(); ++i) {
    if (!(depth(witness, arr.camera(i), tol) > 0.0))
      throw NumericalFailure("nonemptiness witness failed depth re-check");
  }
  return {true, witness};
}

namespace domain_detail {

// Banded signs of (n_1^T q, ..., n_m^T q, q_4), each scaled by its own row
// and point norms so the band is scale free.
inline std::vector<int> factor_signs(const CameraArrangement& arr,
                                     const ProjectivePoint& q, double tol) {
  const double qn = q.coords().lpNorm<Eigen::Infinity>();
  std::vector<int> signs;
  signs.reserve(arr.size() + 1);
  for (int i = 0; i < arr.size(); ++i) {
    const Vec4& n = arr.ray(i);
    signs.push_back(banded_sign(n.dot(q.coords()),
                                n.lpNorm<Eigen::Infinity>() * qn, tol));
  }
  signs.push_back(banded_sign(q.coords()[3], qn, tol));
  return signs;
}

}  // namespace domain_detail

// Evaluates the non-strict sign system (n_i^T q)(n_j^T q) >= 0 over all pairs
// from {1..m, inf} without the nonemptiness guard. Callers that need the raw
// inequality evaluation for empty domains use this directly.
inline bool satisfies_sign_system(const CameraArrangement& arr,
                                  const ProjectivePoint& q,
                                  double tol = kDefaultTol) {
  const auto signs = domain_detail::factor_signs(arr, q, tol);
  int seen = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (seen == 0) seen = s;
    else if (seen != s) return false;
  }
  return true;
}

// Membership in the chiral domain via its quadratic description. Only valid
// for nonempty domains; otherwise reports DomainEmpty without evaluating.
inline DomainStatus contains(const CameraArrangement& arr,
                             const ProjectivePoint& q,
                             double tol = kDefaultTol) {
  if (arr.nonempty_certificate().status != FeasibilityStatus::StrictlyFeasible)
    return DomainStatus::DomainEmpty;
  const auto signs = domain_detail::factor_signs(arr, q, tol);
  bool any_zero = false;
  int seen = 0;
  for (int s : signs) {
    if (s == 0) {
      any_zero = true;
      continue;
    }
    if (seen == 0) seen = s;
    else if (seen != s) return DomainStatus::Outside;
  }
  return any_zero ? DomainStatus::Boundary : DomainStatus::Interior;
}

// Halfspace description {q : q_4 >= 0, n_i^T q >= 0} of the cone Q whose
// projectivization is the chiral domain (when nonempty). Returned as the
// generators of the dual cone, so q in Q iff dual_member(result, q).
inline ConeGenerators same_side_cone(const CameraArrangement& arr) {
  std::vector<Vec4> rows;
  rows.reserve(arr.size() + 1);
  rows.push_back(infinity_normal());
  for (int i = 0; i < arr.size(); ++i) rows.push_back(arr.ray(i));
  return ConeGenerators(std::move(rows));
}

// Single-camera specialization: (n_A^T q)(n_inf^T q) >= 0. Every point of
// the principal plane or the plane at infinity passes.
inline bool single_camera_domain_check(const FiniteCamera& a,
                                       const ProjectivePoint& q,
                                       double tol = kDefaultTol) {
  return chirality_sign(q, a, tol) >= 0;
}

}  // namespace chiralkit
