#pragma once

#include "chiralkit/reconstruction.hpp"

#include <array>
#include <optional>
#include <vector>

namespace chiralkit {

// A camera of the form [R | t] with R in SO(3).
class EuclideanCamera {
 public:
  EuclideanCamera(const Mat3& rotation, const Vec3& translation)
      : r_(rotation), t_(translation) {
    if ((r_.transpose() * r_ - Mat3::Identity())
            .lpNorm<Eigen::Infinity>() > 1e-9)
      throw std::invalid_argument("rotation block is not orthonormal");
    if (!(r_.determinant() > 0.0))
      throw std::invalid_argument("rotation block must have determinant +1");
  }

  static EuclideanCamera from_camera(const FiniteCamera& cam) {
    return EuclideanCamera(cam.g(), cam.t());
  }

  const Mat3& rotation() const { return r_; }
  const Vec3& translation() const { return t_; }

  FiniteCamera as_camera() const {
    Mat34 m;
    m.leftCols<3>() = r_;
    m.col(3) = t_;
    return FiniteCamera(m);
  }

 private:
  Mat3 r_;
  Vec3 t_;
};

// The two vectors v for which [R + t v^T | t] stays quasi-Euclidean:
// v = 0 and v = -(2/||t||^2) R^T t. Both are re-checked for orthogonality.
inline std::array<Vec3, 2> quasi_euclidean_v_solutions(
    const EuclideanCamera& cam, double tol = kDefaultTol) {
  const Vec3& t = cam.translation();
  if (t.norm() <= tol) throw ZeroTranslationError();
  const std::array<Vec3, 2> solutions = {
      Vec3::Zero(), Vec3(-(2.0 / t.squaredNorm()) * cam.rotation().transpose() * t)};
  for (const auto& v : solutions) {
    const Mat3 u = cam.rotation() + t * v.transpose();
    if ((u * u.transpose() - Mat3::Identity()).lpNorm<Eigen::Infinity>() > 1e-9)
      throw NumericalFailure("twist solution is not orthogonal");
  }
  return solutions;
}

// The four homographies preserving quasi-Euclidean form of a two-camera rig:
// identity, reflection, and the two v-twisted variants.
struct TwistedPairSet {
  std::array<Homography, 4> h;
  Vec3 v;

  const Homography& operator[](int i) const { return h[i]; }
};

inline TwistedPairSet twisted_pair_homographies(const EuclideanCamera& a2,
                                                double tol = kDefaultTol) {
  const Vec3 v = quasi_euclidean_v_solutions(a2, tol)[1];
  auto block = [](const Vec3& row, double corner) {
    Mat4 m = Mat4::Identity();
    m.row(3).head<3>() = row.transpose();
    m(3, 3) = corner;
    return m;
  };
  const Mat4 h1 = block(Vec3::Zero(), 1.0);
  const Mat4 h2 = block(Vec3::Zero(), -1.0);
  const Mat4 h3_inv = block(v, 1.0);
  const Mat4 h3 = block(-v, 1.0);
  const Mat4 h4 = block(v, -1.0);  // involution
  return TwistedPairSet{
      {Homography::from_matrix_and_inverse(h1, h1),
       Homography::from_matrix_and_inverse(h2, h2),
       Homography::from_matrix_and_inverse(h3, h3_inv),
       Homography::from_matrix_and_inverse(h4, h4)},
      v};
}

namespace euclidean_detail {

inline bool is_identity_camera(const FiniteCamera& cam, double tol) {
  Mat34 expect = Mat34::Zero();
  expect.leftCols<3>() = Mat3::Identity();
  return (cam.matrix() - expect).lpNorm<Eigen::Infinity>() <= tol;
}

// Similarity moving the first camera to [I | 0]; chirality is unaffected.
inline Homography normalizing_similarity(const EuclideanCamera& a1) {
  Mat4 s = Mat4::Identity();
  s.topLeftCorner<3, 3>() = a1.rotation();
  s.topRightCorner<3, 1>() = a1.translation();
  Mat4 s_inv = Mat4::Identity();
  s_inv.topLeftCorner<3, 3>() = a1.rotation().transpose();
  s_inv.topRightCorner<3, 1>() = -a1.rotation().transpose() * a1.translation();
  return Homography::from_matrix_and_inverse(s, s_inv);
}

struct NormalizedInput {
  std::vector<EuclideanCamera> cameras;
  std::vector<Vec4> points;
  std::vector<int> sigma;
  Homography similarity = Homography::identity();
};

inline NormalizedInput normalize_input(const SignedReconstruction& sr,
                                       double tol) {
  NormalizedInput out;
  const auto& arr = sr.reconstruction.arrangement();
  std::vector<EuclideanCamera> cams;
  cams.reserve(arr.size());
  for (const auto& cam : arr.cameras())
    cams.push_back(EuclideanCamera::from_camera(cam));

  if (is_identity_camera(arr.camera(0), tol)) {
    out.cameras = std::move(cams);
    out.points = sr.reconstruction.world_points();
    out.sigma = sr.sigma;
    return out;
  }
  out.similarity = normalizing_similarity(cams[0]);
  for (const auto& cam : cams) {
    const FiniteCamera moved =
        apply_homography(cam.as_camera(), out.similarity, tol);
    out.cameras.push_back(EuclideanCamera::from_camera(moved));
  }
  for (const auto& q : sr.reconstruction.world_points())
    out.points.push_back(out.similarity.apply(q));
  out.sigma = sr.sigma;  // rotations preserve the depth signs
  return out;
}

// h^T q_k >= 0 for all points, within the band.
inline bool in_point_dual(const Vec4& h, const std::vector<Vec4>& points,
                          double tol) {
  for (const auto& q : points) {
    if (h.dot(q) < -tol * h.lpNorm<Eigen::Infinity>() *
                        q.lpNorm<Eigen::Infinity>())
      return false;
  }
  return true;
}

struct UpgradeCandidate {
  Homography homography;
  std::vector<EuclideanCamera> cameras;
  std::vector<Vec4> points;
};

// Applies H, normalizes each quasi-Euclidean camera by sign(det U), and
// verifies the result is a chiral Euclidean reconstruction.
inline std::optional<UpgradeCandidate> apply_and_verify(
    const std::vector<EuclideanCamera>& cams, const std::vector<Vec4>& points,
    const Homography& h, double tol) {
  UpgradeCandidate out{h, {}, {}};
  std::vector<FiniteCamera> plain;
  for (const auto& cam : cams) {
    FiniteCamera moved = apply_homography(cam.as_camera(), h, tol);
    Mat3 u = moved.g();
    if ((u * u.transpose() - Mat3::Identity()).lpNorm<Eigen::Infinity>() > 1e-8)
      return std::nullopt;
    const double s = u.determinant() > 0 ? 1.0 : -1.0;
    FiniteCamera normalized(Mat34(s * moved.matrix()));
    out.cameras.push_back(EuclideanCamera::from_camera(normalized));
    plain.push_back(normalized);
  }
  for (const auto& q : points) out.points.push_back(h.apply(q));
  CameraArrangement moved_arr(std::move(plain), tol);
  if (!verify_chiral(moved_arr, out.points, tol)) return std::nullopt;
  return out;
}

}  // namespace euclidean_detail

// Two-view Euclidean upgrade. The sign pattern selects the candidate pair
// (identity/reflection when sigma_1 = sigma_2, the twisted pair otherwise)
// and membership of the candidate's last row in the point dual cone decides;
// the lowest admissible index wins when several candidates qualify. Inputs
// whose first camera is not [I | 0] are first moved by a similarity, which
// is folded into the returned homography.
inline std::optional<Homography> euclidean_two_view_upgrade(
    const SignedReconstruction& sr, double tol = kDefaultTol) {
  if (sr.reconstruction.arrangement().size() != 2)
    throw std::invalid_argument("two-view upgrade needs exactly two cameras");
  const auto input = euclidean_detail::normalize_input(sr, tol);
  const auto twisted = twisted_pair_homographies(input.cameras[1], tol);

  const bool same_sign = input.sigma[0] == input.sigma[1];
  const std::array<int, 2> candidates =
      same_sign ? std::array<int, 2>{0, 1} : std::array<int, 2>{2, 3};
  for (int idx : candidates) {
    const Homography& h = twisted[idx];
    // Candidate i is admissible when sigma_1 h_i lies in the dual cone of
    // the points; the sigma_1 factor accounts for delta and the side of the
    // center cone at once.
    if (!euclidean_detail::in_point_dual(input.sigma[0] * h.last_row(),
                                         input.points, tol))
      continue;
    const auto result = euclidean_detail::apply_and_verify(
        input.cameras, input.points, h, tol);
    if (!result) continue;
    return Homography(Mat4(h.matrix() * input.similarity.matrix()));
  }
  return std::nullopt;
}

// Multiview (m > 2) Euclidean upgrade: all per-camera signs must agree and
// the world points' last coordinates must share one sign; only the identity
// and the reflection are available since the twist vector is camera
// specific.
inline std::optional<Homography> euclidean_multiview_upgrade(
    const SignedReconstruction& sr, double tol = kDefaultTol) {
  if (sr.reconstruction.arrangement().size() <= 2)
    throw std::invalid_argument("multiview upgrade needs more than two cameras");
  const auto input = euclidean_detail::normalize_input(sr, tol);
  for (size_t i = 1; i < input.sigma.size(); ++i)
    if (input.sigma[i] != input.sigma[0]) return std::nullopt;

  Mat4 reflect = Mat4::Identity();
  reflect(3, 3) = -1.0;
  const std::array<Homography, 2> candidates = {
      Homography::identity(),
      Homography::from_matrix_and_inverse(reflect, reflect)};
  for (const auto& h : candidates) {
    if (!euclidean_detail::in_point_dual(input.sigma[0] * h.last_row(),
                                         input.points, tol))
      continue;
    const auto result = euclidean_detail::apply_and_verify(
        input.cameras, input.points, h, tol);
    if (!result) continue;
    return Homography(Mat4(h.matrix() * input.similarity.matrix()));
  }
  return std::nullopt;
}

}  // namespace chiralkit
