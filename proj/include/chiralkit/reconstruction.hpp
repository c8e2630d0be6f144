#pragma once

#include "chiralkit/joint_image.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace chiralkit {

// Image correspondences: one finite point per camera per track, stored in
// R^2 and embedded as (x, y, 1) when projective coordinates are needed.
struct Correspondences {
  int m = 0;
  int n = 0;
  std::vector<std::vector<Vec2>> entries;  // entries[i][k], camera i, point k

  Correspondences() = default;
  Correspondences(int cameras, int points)
      : m(cameras), n(points),
        entries(cameras, std::vector<Vec2>(points, Vec2::Zero())) {
    if (m < 2 || n < 1)
      throw std::invalid_argument("correspondences need m >= 2, n >= 1");
  }
};

// Entrywise signs of n_i^T q_k; never zero for a valid reconstruction.
using SignMatrix = Eigen::MatrixXi;

inline SignMatrix sign_matrix(const CameraArrangement& arr,
                              const std::vector<Vec4>& points,
                              double tol = kDefaultTol) {
  SignMatrix sigma(arr.size(), static_cast<int>(points.size()));
  for (int i = 0; i < arr.size(); ++i) {
    const Vec4& n = arr.ray(i);
    for (int k = 0; k < static_cast<int>(points.size()); ++k) {
      const int s = banded_sign(n.dot(points[k]),
                                n.lpNorm<Eigen::Infinity>() *
                                    points[k].lpNorm<Eigen::Infinity>(),
                                tol);
      if (s == 0) throw PointOnPrincipalPlaneError();
      sigma(i, k) = s;
    }
  }
  return sigma;
}

// A camera arrangement together with world-point representatives whose
// projections reproduce a set of correspondences. The projective scales
// w_ik are re-derived from A_i q_k rather than trusted from the caller, and
// points on principal planes are rejected up front.
class ProjectiveReconstruction {
 public:
  ProjectiveReconstruction(CameraArrangement arrangement,
                           std::vector<Vec4> world_points,
                           double tol = kDefaultTol)
      : arr_(std::move(arrangement)), points_(std::move(world_points)) {
    if (points_.empty())
      throw std::invalid_argument("reconstruction needs at least one point");
    for (const auto& q : points_)
      if (!(q.lpNorm<Eigen::Infinity>() > 0.0))
        throw std::invalid_argument("world point must be nonzero");
    sigma_ = chiralkit::sign_matrix(arr_, points_, tol);
    const int m = arr_.size();
    const int n = static_cast<int>(points_.size());
    scales_.resize(m, n);
    correspondences_ = Correspondences(m, n);
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < n; ++k) {
        const Vec3 image = arr_.camera(i).matrix() * points_[k];
        scales_(i, k) = image[2];
        correspondences_.entries[i][k] = image.head<2>() / image[2];
      }
    }
  }

  // Checks caller-supplied correspondences against the projections instead
  // of trusting them.
  ProjectiveReconstruction(CameraArrangement arrangement,
                           std::vector<Vec4> world_points,
                           const Correspondences& given,
                           double tol = kDefaultTol)
      : ProjectiveReconstruction(std::move(arrangement),
                                 std::move(world_points), tol) {
    if (given.m != arr_.size() || given.n != static_cast<int>(points_.size()))
      throw std::invalid_argument("correspondence grid has wrong shape");
    for (int i = 0; i < given.m; ++i)
      for (int k = 0; k < given.n; ++k)
        if ((given.entries[i][k] - correspondences_.entries[i][k]).norm() >
            1e-6 * (1.0 + correspondences_.entries[i][k].norm()))
          throw std::invalid_argument(
              "correspondences are inconsistent with the reconstruction");
  }

  const CameraArrangement& arrangement() const { return arr_; }
  const std::vector<Vec4>& world_points() const { return points_; }
  const Eigen::MatrixXd& scales() const { return scales_; }
  const SignMatrix& sign_matrix() const { return sigma_; }
  const Correspondences& correspondences() const { return correspondences_; }

 private:
  CameraArrangement arr_;
  std::vector<Vec4> points_;
  Eigen::MatrixXd scales_;
  SignMatrix sigma_;
  Correspondences correspondences_;
};

// A reconstruction whose representatives give every camera a constant depth
// sign sigma_i.
struct SignedReconstruction {
  ProjectiveReconstruction reconstruction;
  std::vector<int> sigma;  // per camera, +1 or -1
};

// Signing succeeds iff sigma_ik sigma_jk is constant over k for every pair;
// equivalently each row's product with row 1 is constant. On success, points
// with sigma_1k = -1 are flipped so the first camera's sign becomes +1.
inline std::optional<SignedReconstruction> try_sign(
    const ProjectiveReconstruction& r, double tol = kDefaultTol) {
  const SignMatrix& sigma = r.sign_matrix();
  const int m = sigma.rows();
  const int n = sigma.cols();
  for (int i = 1; i < m; ++i) {
    const int product = sigma(i, 0) * sigma(0, 0);
    for (int k = 1; k < n; ++k)
      if (sigma(i, k) * sigma(0, k) != product) return std::nullopt;
  }
  std::vector<Vec4> flipped = r.world_points();
  for (int k = 0; k < n; ++k)
    if (sigma(0, k) < 0) flipped[k] = -flipped[k];
  ProjectiveReconstruction signed_r(r.arrangement(), std::move(flipped), tol);
  std::vector<int> per_camera(m);
  for (int i = 0; i < m; ++i) per_camera[i] = signed_r.sign_matrix()(i, 0);
  return SignedReconstruction{std::move(signed_r), std::move(per_camera)};
}

// q_k in D_A for all k; vacuously true for an empty point list over a
// nonempty domain.
inline bool verify_chiral(const CameraArrangement& arr,
                          const std::vector<Vec4>& points,
                          double tol = kDefaultTol) {
  const auto [nonempty, witness] = is_nonempty(arr, tol);
  if (!nonempty) return false;
  for (const auto& q : points)
    if (contains(arr, ProjectivePoint(q), tol) == DomainStatus::Outside)
      return false;
  return true;
}

inline bool verify_chiral(const ProjectiveReconstruction& r,
                          double tol = kDefaultTol) {
  return verify_chiral(r.arrangement(), r.world_points(), tol);
}

enum class UpgradeStatus { Upgradable, NotSignable, ConesDisjoint };

struct UpgradeResult {
  UpgradeStatus status = UpgradeStatus::ConesDisjoint;
  std::optional<Homography> homography;
  int system = 0;              // 1 or 2 when upgradable
  FeasibilityResult certificate;
  bool boundary_witness = false;
};

namespace upgrade_detail {

// Completes a plane normal h to an invertible matrix whose first three rows
// are an orthonormal basis of h-perp. The determinant sign is the caller's
// choice: the transformed principal rays pick up delta = det(H^{-1}), so the
// same-side system wants det(H) > 0 and the opposite-side system det(H) < 0.
inline Homography complete_homography(const Vec4& h, bool positive_det) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h.transpose(), Eigen::ComputeFullV);
  Mat4 m;
  m.row(3) = h.transpose();
  for (int r = 0; r < 3; ++r) m.row(r) = svd.matrixV().col(r + 1).transpose();
  const double det = m.determinant();
  if ((det > 0) != positive_det) m.row(0) = -m.row(0);
  return Homography(m);
}

struct SystemSolve {
  FeasibilityResult certificate;
  std::optional<Vec4> h;
  bool boundary = false;
};

// One of the two cone systems: h in K_Q* with h strictly inside the dual of
// the (possibly negated) signed-center cone. The strict-on-everything
// program is attempted first so the witness keeps all world points off the
// new plane at infinity; if only the mixed program is feasible the boundary
// witness is kept and flagged.
inline SystemSolve solve_system(const std::vector<Vec4>& center_rows,
                                const std::vector<Vec4>& point_rows,
                                double tol) {
  SystemSolve out;
  FeasibilityProblem mixed({}, center_rows, point_rows);
  out.certificate = solve_feasibility(mixed, tol);
  if (out.certificate.status != FeasibilityStatus::StrictlyFeasible)
    return out;

  std::vector<Vec4> all_rows = center_rows;
  all_rows.insert(all_rows.end(), point_rows.begin(), point_rows.end());
  const auto interior = solve_feasibility(FeasibilityProblem({}, all_rows, {}),
                                          tol);
  if (interior.status == FeasibilityStatus::StrictlyFeasible) {
    out.h = interior.witness;
    out.certificate = interior;
  } else {
    out.h = out.certificate.witness;
    out.boundary = true;
  }
  return out;
}

}  // namespace upgrade_detail

// Decides whether a homography can make the signed reconstruction chiral,
// via the two cone feasibility systems, and constructs a verified homography
// when one exists. Both systems are solved; the larger margin wins.
inline UpgradeResult chiral_upgrade(const SignedReconstruction& sr,
                                    double tol = kDefaultTol) {
  const auto& r = sr.reconstruction;
  const auto& arr = r.arrangement();
  const int m = arr.size();

  std::vector<Vec4> signed_centers(m);
  for (int i = 0; i < m; ++i)
    signed_centers[i] = sr.sigma[i] * arr.center(i);
  std::vector<Vec4> negated(m);
  for (int i = 0; i < m; ++i) negated[i] = -signed_centers[i];

  const auto s1 = upgrade_detail::solve_system(signed_centers,
                                               r.world_points(), tol);
  const auto s2 = upgrade_detail::solve_system(negated, r.world_points(), tol);

  UpgradeResult out;
  const bool ok1 = s1.h.has_value();
  const bool ok2 = s2.h.has_value();
  if (!ok1 && !ok2) {
    out.status = UpgradeStatus::ConesDisjoint;
    out.certificate = s1.certificate;
    return out;
  }
  const double e1 = ok1 ? s1.certificate.eps.value_or(0.0) : -1.0;
  const double e2 = ok2 ? s2.certificate.eps.value_or(0.0) : -1.0;
  const bool use_first = ok1 && (!ok2 || e1 >= e2);
  const auto& chosen = use_first ? s1 : s2;

  out.status = UpgradeStatus::Upgradable;
  out.system = use_first ? 1 : 2;
  out.certificate = chosen.certificate;
  out.boundary_witness = chosen.boundary;
  out.homography =
      upgrade_detail::complete_homography(*chosen.h, /*positive_det=*/use_first);

  // End-to-end re-verification on the transformed reconstruction.
  std::vector<FiniteCamera> moved;
  moved.reserve(m);
  for (int i = 0; i < m; ++i)
    moved.push_back(apply_homography(arr.camera(i), *out.homography, tol));
  std::vector<Vec4> moved_points;
  moved_points.reserve(r.world_points().size());
  for (const auto& q : r.world_points())
    moved_points.push_back(out.homography->apply(q));
  CameraArrangement moved_arr(std::move(moved), tol);
  const auto [nonempty, witness] = is_nonempty(moved_arr, tol);
  if (!nonempty)
    throw NumericalFailure("upgraded arrangement has an empty chiral domain");
  for (const auto& q : moved_points)
    if (contains(moved_arr, ProjectivePoint(q), tol) == DomainStatus::Outside)
      throw NumericalFailure("upgraded reconstruction failed the chirality check");
  return out;
}

// try_sign then chiral_upgrade; NotSignable when signing is impossible.
inline UpgradeResult upgrade_reconstruction(const ProjectiveReconstruction& r,
                                            double tol = kDefaultTol) {
  const auto sr = try_sign(r, tol);
  if (!sr) {
    UpgradeResult out;
    out.status = UpgradeStatus::NotSignable;
    return out;
  }
  return chiral_upgrade(*sr, tol);
}

// Quasi-affinity of H with respect to X: the last row of H leaves X in one
// closed (strict: open) halfspace.
inline bool is_quasi_affine(const Homography& h, const std::vector<Vec4>& x,
                            bool strict, double tol = kDefaultTol) {
  if (x.empty()) throw std::invalid_argument("quasi-affinity needs points");
  const Vec4 row = h.last_row();
  bool all_nonneg = true, all_nonpos = true, all_pos = true, all_neg = true;
  for (const auto& v : x) {
    const int s = banded_sign(row.dot(v),
                              row.lpNorm<Eigen::Infinity>() *
                                  v.lpNorm<Eigen::Infinity>(),
                              tol);
    if (s < 0) all_nonneg = false;
    if (s > 0) all_nonpos = false;
    if (s <= 0) all_pos = false;
    if (s >= 0) all_neg = false;
  }
  return strict ? (all_pos || all_neg) : (all_nonneg || all_nonpos);
}

// Hartley's two-view criterion: the products (n_1^T q_k)(n_2^T q_k) must
// carry one sign across all points.
inline bool two_view_upgradable(const ProjectiveReconstruction& r) {
  if (r.arrangement().size() != 2)
    throw std::invalid_argument("two-view test needs exactly two cameras");
  const SignMatrix& sigma = r.sign_matrix();
  const int first = sigma(0, 0) * sigma(1, 0);
  for (int k = 1; k < sigma.cols(); ++k)
    if (sigma(0, k) * sigma(1, k) != first) return false;
  return true;
}

}  // namespace chiralkit
