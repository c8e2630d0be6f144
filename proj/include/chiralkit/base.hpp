#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace chiralkit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

// Default width of the sign band around zero. Overridable per call; the CLI
// reads CHIRALKIT_TOL and threads it through.
inline constexpr double kDefaultTol = 1e-9;
// |det G| relative to ||G||^3 below this means the camera is not finite.
inline constexpr double kDetTol = 1e-12;
// Normalized smallest singular value above this rejects joint-image membership.
inline constexpr double kTriangulationTol = 1e-7;
// Relative singular value threshold for rank decisions.
inline constexpr double kRankTol = 1e-9;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InfinitePointError : Error {
  InfinitePointError() : Error("point lies on the plane at infinity") {}
};
struct CenterPointError : Error {
  CenterPointError() : Error("point is identified with the camera center") {}
};
struct CoincidentCentersError : Error {
  CoincidentCentersError() : Error("camera centers are identified") {}
};
struct InfiniteResultCameraError : Error {
  InfiniteResultCameraError()
      : Error("homography sends the camera center to the plane at infinity") {}
};
struct PointOnPrincipalPlaneError : Error {
  PointOnPrincipalPlaneError()
      : Error("world point lies on a principal plane") {}
};
struct ZeroTranslationError : Error {
  ZeroTranslationError() : Error("camera translation is zero") {}
};
struct DomainEmptyError : Error {
  DomainEmptyError() : Error("chiral domain of the arrangement is empty") {}
};
struct NumericalFailure : Error {
  explicit NumericalFailure(const std::string& what) : Error(what) {}
};

inline const Vec4& infinity_normal() {
  static const Vec4 n(0.0, 0.0, 0.0, 1.0);
  return n;
}

// Sign with a tolerance band: values within tol*scale of zero report 0.
inline int banded_sign(double value, double scale, double tol = kDefaultTol) {
  const double band = tol * std::max(scale, 1e-300);
  if (value > band) return 1;
  if (value < -band) return -1;
  return 0;
}

// Scale-invariant equality in projective space via the rank-1 criterion:
// p ~ q iff all 2x2 minors of [p q] vanish. Avoids dividing by small entries.
template <typename Derived>
bool projectively_equal(const Eigen::MatrixBase<Derived>& p,
                        const Eigen::MatrixBase<Derived>& q,
                        double tol = kDefaultTol) {
  const double scale = p.template lpNorm<Eigen::Infinity>() *
                       q.template lpNorm<Eigen::Infinity>();
  for (int i = 0; i < p.size(); ++i) {
    for (int j = i + 1; j < p.size(); ++j) {
      if (std::abs(p[i] * q[j] - p[j] * q[i]) > tol * scale) return false;
    }
  }
  return true;
}

// A point of P^3, stored as a chosen representative in R^4 \ {0}.
class ProjectivePoint {
 public:
  explicit ProjectivePoint(const Vec4& coords) : coords_(coords) {
    if (!(coords_.lpNorm<Eigen::Infinity>() > 0.0))
      throw std::invalid_argument("projective point must be nonzero");
  }
  ProjectivePoint(double x, double y, double z, double w)
      : ProjectivePoint(Vec4(x, y, z, w)) {}

  const Vec4& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }

  bool is_finite(double tol = kDefaultTol) const {
    return std::abs(coords_[3]) > tol * coords_.lpNorm<Eigen::Infinity>();
  }

  // Affine representative (q1/q4, q2/q4, q3/q4); only meaningful when finite.
  Vec3 dehomogenized() const { return coords_.head<3>() / coords_[3]; }

 private:
  Vec4 coords_;
};

// A point of P^2.
class ImagePoint {
 public:
  explicit ImagePoint(const Vec3& coords) : coords_(coords) {
    if (!(coords_.lpNorm<Eigen::Infinity>() > 0.0))
      throw std::invalid_argument("image point must be nonzero");
  }
  ImagePoint(double x, double y, double w) : ImagePoint(Vec3(x, y, w)) {}

  const Vec3& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }

 private:
  Vec3 coords_;
};

inline bool identified(const ProjectivePoint& p, const ProjectivePoint& q,
                       double tol = kDefaultTol) {
  return projectively_equal(p.coords(), q.coords(), tol);
}

inline bool identified(const ImagePoint& p, const ImagePoint& q,
                       double tol = kDefaultTol) {
  return projectively_equal(p.coords(), q.coords(), tol);
}

}  // namespace chiralkit
