#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace chiralkit;

namespace {

ProjectiveReconstruction identity_pair_reconstruction(std::vector<Vec4> pts) {
  return ProjectiveReconstruction(support::identity_pair(), std::move(pts));
}

// A chiral two-view reconstruction with interior points, deterministically
// randomized.
ProjectiveReconstruction random_chiral_two_view(TrialRng& rng, int n_points) {
  const auto arr = support::random_nonempty_arrangement(rng, 2);
  std::vector<Vec4> pts;
  for (int k = 0; k < n_points; ++k)
    pts.push_back(support::random_interior_point(rng, arr).coords());
  return ProjectiveReconstruction(arr, std::move(pts));
}

Homography random_homography_clearing_centers(TrialRng& rng,
                                              const CameraArrangement& arr) {
  for (;;) {
    Mat4 m;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = rng.uniform(-1.0, 1.0);
    if (std::abs(m.determinant()) < 1e-2) continue;
    const Vec4 h = m.row(3).transpose();
    bool clear = true;
    for (int i = 0; i < arr.size(); ++i)
      clear = clear && std::abs(h.dot(arr.center(i))) >
                           0.1 * h.norm() * arr.center(i).norm();
    if (clear) return Homography(m);
  }
}

ProjectiveReconstruction transform(const ProjectiveReconstruction& r,
                                   const Homography& h) {
  std::vector<FiniteCamera> cams;
  for (const auto& cam : r.arrangement().cameras())
    cams.push_back(apply_homography(cam, h));
  std::vector<Vec4> pts;
  for (const auto& q : r.world_points()) pts.push_back(h.apply(q));
  return ProjectiveReconstruction(CameraArrangement(std::move(cams)),
                                  std::move(pts));
}

// Membership of h in either unsigned cone system, evaluated directly from
// the per-entry sign matrix.
bool in_unsigned_system(const Vec4& h, const CameraArrangement& arr,
                        const std::vector<Vec4>& pts, const SignMatrix& sigma) {
  const int m = arr.size();
  const int n = static_cast<int>(pts.size());
  for (int side : {1, -1}) {
    bool ok = true;
    for (int i = 0; i < m && ok; ++i)
      for (int k = 0; k < n && ok; ++k)
        ok = side * h.dot(pts[k]) * h.dot(arr.center(i)) * sigma(i, k) >= 0.0;
    for (int i = 0; i < m && ok; ++i)
      for (int j = i + 1; j < m && ok; ++j)
        for (int k = 0; k < n && ok; ++k)
          ok = h.dot(arr.center(i)) * h.dot(arr.center(j)) * sigma(i, k) *
                   sigma(j, k) >
               0.0;
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("sign matrices") {
  SECTION("the gap fixture is all ones") {
    const auto gap = support::three_view_gap();
    const auto sigma = sign_matrix(gap.arrangement, gap.points);
    CHECK(sigma.minCoeff() == 1);
    CHECK(sigma.maxCoeff() == 1);
  }
  SECTION("basic signs and the principal plane error") {
    Mat34 id;
    id << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0;
    Mat34 shifted = id;
    shifted.col(3) = Vec3(1, 1, 1);
    CameraArrangement arr({FiniteCamera(id), FiniteCamera(shifted)});
    CHECK(sign_matrix(arr, {Vec4(0, 0, 1, 1)})(0, 0) == 1);
    CHECK_THROWS_AS(sign_matrix(arr, {Vec4(1, 0, 0, 1)}),
                    PointOnPrincipalPlaneError);
    CHECK_THROWS_AS(
        ProjectiveReconstruction(arr, {Vec4(1, 0, 0, 1)}),
        PointOnPrincipalPlaneError);
  }
}

TEST_CASE("signing a reconstruction") {
  SECTION("the gap fixture is already signed") {
    const auto gap = support::three_view_gap();
    const auto sr = try_sign(
        ProjectiveReconstruction(gap.arrangement, gap.points));
    REQUIRE(sr.has_value());
    CHECK(sr->sigma == std::vector<int>{1, 1, 1});
    CHECK(sr->reconstruction.world_points()[0] == gap.points[0]);
  }
  SECTION("a flipped representative is signed back") {
    auto r = identity_pair_reconstruction(
        {Vec4(0, 0, 1, 1), Vec4(0, 0, -2, -1), Vec4(1, 1, 1, 1)});
    CHECK(r.sign_matrix()(0, 1) == -1);
    const auto sr = try_sign(r);
    REQUIRE(sr.has_value());
    CHECK(sr->sigma == std::vector<int>{1, 1});
    CHECK(sr->reconstruction.world_points()[1] == Vec4(0, 0, 2, 1));
  }
  SECTION("mixed products cannot be signed") {
    auto r = identity_pair_reconstruction(
        {Vec4(0, 0, 1, 1), Vec4(0, 0, 1, -2)});
    CHECK(r.sign_matrix()(0, 1) == 1);
    CHECK(r.sign_matrix()(1, 1) == -1);
    CHECK_FALSE(try_sign(r).has_value());
  }
}

TEST_CASE("the three-view gap fixture is signed but not upgradable") {
  const auto gap = support::three_view_gap();
  ProjectiveReconstruction r(gap.arrangement, gap.points);
  const auto sr = try_sign(r);
  REQUIRE(sr.has_value());
  const auto result = chiral_upgrade(*sr);
  CHECK(result.status == UpgradeStatus::ConesDisjoint);

  // The Farkas certificates annihilate the sign-adjusted column matrices
  // exactly.
  Eigen::Matrix<double, 4, 5> m_plus, m_minus;
  for (int i = 0; i < 3; ++i) {
    m_plus.col(i) = gap.arrangement.center(i);
    m_minus.col(i) = -gap.arrangement.center(i);
  }
  for (int k = 0; k < 2; ++k) {
    m_plus.col(3 + k) = gap.points[k];
    m_minus.col(3 + k) = gap.points[k];
  }
  Eigen::Matrix<double, 5, 1> v_plus, v_minus;
  v_plus << 11, 1, 6, 4, 1;
  v_minus << 1, 11, 6, 1, 4;
  CHECK((m_plus * v_plus).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((m_minus * v_minus).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(v_plus.minCoeff() > 0);
  CHECK(v_minus.minCoeff() > 0);
}

TEST_CASE("already-chiral reconstructions upgrade through the same side") {
  auto r = identity_pair_reconstruction(
      {Vec4(0, 0, 1, 1), Vec4(-4, 0, 1, 1), Vec4(1, 2, 3, 1)});
  const auto sr = try_sign(r);
  REQUIRE(sr.has_value());
  const auto result = chiral_upgrade(*sr);
  REQUIRE(result.status == UpgradeStatus::Upgradable);
  CHECK(result.system == 1);
  // The plane at infinity itself is an admissible last row here.
  for (const auto& q : r.world_points()) CHECK(infinity_normal().dot(q) > 0);
  for (int i = 0; i < 2; ++i)
    CHECK(infinity_normal().dot(r.arrangement().center(i)) > 0);
  CHECK(verify_chiral(transform(r, *result.homography)));
}

TEST_CASE("sign-reversed chiral reconstructions upgrade through the opposite side") {
  // All depth signs positive but every representative has negative last
  // coordinate, so only the negated-center system admits a plane.
  auto r = identity_pair_reconstruction(
      {Vec4(0, 0, 2, -1), Vec4(0, 0, 3, -1), Vec4(1, 0, 4, -1)});
  const auto sr = try_sign(r);
  REQUIRE(sr.has_value());
  CHECK(sr->sigma == std::vector<int>{1, 1});
  const auto result = chiral_upgrade(*sr);
  REQUIRE(result.status == UpgradeStatus::Upgradable);
  CHECK(result.system == 2);
  CHECK(result.homography->matrix().determinant() < 0.0);
  CHECK(verify_chiral(transform(r, *result.homography)));
}

TEST_CASE("upgrades recovered after a scrambling homography") {
  for (int trial = 0; trial < 50; ++trial) {
    TrialRng rng(101, trial);
    const auto chiral = random_chiral_two_view(rng, 2 + trial % 4);
    REQUIRE(verify_chiral(chiral));
    const auto h0 =
        random_homography_clearing_centers(rng, chiral.arrangement());
    const auto scrambled = transform(chiral, h0);
    const auto sr = try_sign(scrambled);
    REQUIRE(sr.has_value());
    const auto result = chiral_upgrade(*sr);
    REQUIRE(result.status == UpgradeStatus::Upgradable);
    const auto restored = transform(scrambled, *result.homography);
    CHECK(verify_chiral(restored));
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(result.homography->last_row().dot(
                scrambled.arrangement().center(i))) > 1e-9);
  }
}

TEST_CASE("quasi-affinity of homographies") {
  std::vector<Vec4> finite = {Vec4(1, 2, 3, 1), Vec4(-1, 0, 2, 1),
                              Vec4(0, 1, -4, 1)};
  CHECK(is_quasi_affine(Homography::identity(), finite, /*strict=*/true));
  CHECK(is_quasi_affine(Homography::identity(), finite, /*strict=*/false));

  std::vector<Vec4> mixed = {Vec4(0, 0, 0, 1), Vec4(0, 0, 0, -1)};
  CHECK_FALSE(is_quasi_affine(Homography::identity(), mixed, false));

  const auto gap = support::three_view_gap();
  CHECK_FALSE(is_quasi_affine(Homography::identity(),
                              {gap.points[0], gap.points[1]}, false));
}

TEST_CASE("two-view criterion") {
  SECTION("a single point is always upgradable") {
    const auto r = identity_pair_reconstruction({Vec4(0, 0, -5, 1)});
    CHECK(two_view_upgradable(r));
    const auto sr = try_sign(r);
    REQUIRE(sr.has_value());
    CHECK(chiral_upgrade(*sr).status == UpgradeStatus::Upgradable);
  }
  SECTION("constant positive products") {
    const auto r = identity_pair_reconstruction(
        {Vec4(0, 0, 1, 1), Vec4(0, 0, 2, 1), Vec4(1, 1, 3, 1)});
    CHECK(two_view_upgradable(r));
  }
  SECTION("mixed products fail and cannot be signed") {
    const auto r = identity_pair_reconstruction(
        {Vec4(0, 0, 1, 1), Vec4(0, 0, 1, -2)});
    CHECK_FALSE(two_view_upgradable(r));
    CHECK_FALSE(try_sign(r).has_value());
  }
}

TEST_CASE("two-view equivalence of the sign test and the cone test") {
  int upgradable_count = 0, blocked_count = 0;
  for (int trial = 0; trial < 500; ++trial) {
    TrialRng rng(103, trial);
    const auto arr = support::random_arrangement(rng, 2);
    const int n = 1 + static_cast<int>(rng.uniform() * 5);
    std::vector<Vec4> pts;
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      Vec4 q = rng.unit_sphere_point();
      // Mix in points extremely close to a principal plane to exercise the
      // boundary-ish band.
      if (rng.uniform() < 0.2) {
        const Vec4& ray = arr.ray(k % 2);
        q -= ray.dot(q) / ray.squaredNorm() * ray;
        q += (rng.uniform() < 0.5 ? 1e-6 : -1e-6) * ray / ray.norm();
      }
      for (int i = 0; i < 2; ++i)
        ok = ok && std::abs(arr.ray(i).dot(q)) >
                       1e-7 * arr.ray(i).norm() * q.norm();
      pts.push_back(q);
    }
    if (!ok) continue;
    ProjectiveReconstruction r(arr, pts);
    const bool sign_route = two_view_upgradable(r);
    const auto sr = try_sign(r);
    CHECK(sign_route == sr.has_value());
    if (!sr) {
      ++blocked_count;
      continue;
    }
    const auto result = chiral_upgrade(*sr);
    CHECK(sign_route == (result.status == UpgradeStatus::Upgradable));
    ++upgradable_count;
  }
  CHECK(upgradable_count > 50);
  CHECK(blocked_count > 50);
}

TEST_CASE("upgrade status survives representative flips and camera rescaling") {
  for (int trial = 0; trial < 60; ++trial) {
    TrialRng rng(107, trial);
    const auto arr = support::random_arrangement(rng, 2);
    const int n = 1 + static_cast<int>(rng.uniform() * 4);
    std::vector<Vec4> pts;
    bool ok = true;
    for (int k = 0; k < n; ++k) {
      const Vec4 q = rng.unit_sphere_point();
      for (int i = 0; i < 2; ++i)
        ok = ok && std::abs(arr.ray(i).dot(q)) >
                       1e-6 * arr.ray(i).norm() * q.norm();
      pts.push_back(q);
    }
    if (!ok) continue;
    ProjectiveReconstruction r(arr, pts);
    const auto base = upgrade_reconstruction(r);

    std::vector<Vec4> flipped = pts;
    for (auto& q : flipped)
      if (rng.uniform() < 0.5) q = -q;
    std::vector<FiniteCamera> scaled;
    for (int i = 0; i < 2; ++i) {
      double lambda = rng.uniform(-3.0, 3.0);
      if (std::abs(lambda) < 0.2) lambda = 1.0;
      scaled.emplace_back(Mat34(lambda * arr.camera(i).matrix()));
    }
    ProjectiveReconstruction altered(CameraArrangement(std::move(scaled)),
                                     std::move(flipped));
    CHECK(upgrade_reconstruction(altered).status == base.status);
  }
}

TEST_CASE("unsignable reconstructions admit no plane even off the LP route") {
  // Necessity of signing: when the per-pair sign products are inconsistent,
  // a coarse direct scan finds nothing in either inequality system.
  int examined = 0;
  for (int trial = 0; examined < 5; ++trial) {
    TrialRng rng(109, trial);
    const auto arr = support::random_arrangement(rng, 3);
    std::vector<Vec4> pts;
    bool ok = true;
    for (int k = 0; k < 3; ++k) {
      const Vec4 q = rng.unit_sphere_point();
      for (int i = 0; i < 3; ++i)
        ok = ok && std::abs(arr.ray(i).dot(q)) >
                       1e-4 * arr.ray(i).norm() * q.norm();
      pts.push_back(q);
    }
    if (!ok) continue;
    ProjectiveReconstruction r(arr, pts);
    if (try_sign(r).has_value()) continue;
    ++examined;
    const auto& sigma = r.sign_matrix();
    const int k = 10;
    bool found = false;
    Vec4 h;
    for (int a = -k; a <= k && !found; ++a)
      for (int b = -k; b <= k && !found; ++b)
        for (int c = -k; c <= k && !found; ++c)
          for (int d = -k; d <= k && !found; ++d) {
            h << a, b, c, d;
            if (h.norm() < 0.5) continue;
            found = in_unsigned_system(h, arr, pts, sigma);
          }
    CHECK_FALSE(found);
  }
  CHECK(examined == 5);
}

TEST_CASE("verify_chiral distinguishes the fixtures") {
  CHECK(verify_chiral(identity_pair_reconstruction({Vec4(0, 0, 1, 1)})));
  const auto gap = support::three_view_gap();
  CHECK_FALSE(verify_chiral(
      ProjectiveReconstruction(gap.arrangement, gap.points)));
  CHECK(verify_chiral(support::identity_pair(), {}));
  CHECK_FALSE(verify_chiral(support::train_pair(), {}));
}

TEST_CASE("correspondence grids are validated") {
  const auto r = identity_pair_reconstruction({Vec4(0, 0, 1, 1)});
  Correspondences good = r.correspondences();
  CHECK_NOTHROW(ProjectiveReconstruction(r.arrangement(), r.world_points(),
                                         good));
  good.entries[0][0][0] += 0.5;
  CHECK_THROWS_AS(
      ProjectiveReconstruction(r.arrangement(), r.world_points(), good),
      std::invalid_argument);
}
