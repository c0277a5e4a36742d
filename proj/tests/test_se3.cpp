#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "hsi/se3.hpp"
#include "oracle.hpp"

using namespace hsi;
using testing_helpers::random_pose;
using testing_helpers::random_rotation;

namespace {

void expect_pose_near(const Pose& a, const Pose& b, double tol) { EXPECT_LE(max_abs_diff(a, b), tol); }

}  // namespace

TEST(Compose, IdentityIsNeutral) {
  Rng rng(11);
  const Pose p = random_pose(rng);
  EXPECT_EQ(compose(Pose::identity(), p), p);
  EXPECT_EQ(compose(p, Pose::identity()), p);
}

TEST(Compose, WithInverseIsIdentity) {
  Rng rng(12);
  const Pose p = random_pose(rng);
  expect_pose_near(compose(p, inverse(p)), Pose::identity(), 1e-12);
}

TEST(Compose, TranslationsAddAgainstMatrixOracle) {
  const Pose got = compose(translate(1, 0, 0), translate(0, 2, 0));
  const oracle::M4 want = oracle::mul(oracle::translation(1, 0, 0), oracle::translation(0, 2, 0));
  EXPECT_EQ(oracle::max_diff(want, got), 0.0);
  EXPECT_EQ(got, translate(1, 2, 0));
}

TEST(Compose, MatchesMatrixOracleOnRandomPoses) {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const Pose a = random_pose(rng);
    const Pose b = random_pose(rng);
    EXPECT_LE(oracle::max_diff(oracle::mul(oracle::from_pose(a), oracle::from_pose(b)), compose(a, b)), 1e-12);
  }
}

TEST(Inverse, IdentityAndPureTranslation) {
  EXPECT_EQ(inverse(Pose::identity()), Pose::identity());
  expect_pose_near(inverse(translate(1, 2, 3)), translate(-1, -2, -3), 0.0);
}

TEST(Inverse, YawedPoseMatchesGeneralMatrixInverse) {
  const Pose p{Vec3(1, 0, 0), rot_z(kPi / 2)};
  EXPECT_LE(oracle::max_diff(oracle::inv(oracle::from_pose(p)), inverse(p)), 1e-15);
  // Hand value: rotate by -90 deg and translate to (0, 1, 0).
  expect_pose_near(inverse(p), Pose{Vec3(0, 1, 0), rot_z(-kPi / 2)}, 1e-15);
}

TEST(Transform, RoundTripIsBitExact) {
  const auto [p0, r0] = from_transform(to_transform(Vec3::Zero(), Mat3::Identity()));
  EXPECT_EQ(to_transform(p0, r0), Pose::identity());

  const Vec3 p(1, 2, 3);
  const Mat3 r = rot_z(kPi / 4);
  const auto [p1, r1] = from_transform(to_transform(p, r));
  EXPECT_EQ(p1, p);
  EXPECT_EQ(r1, r);

  Rng rng(14);
  for (int i = 0; i < 1000; ++i) {
    const Pose t = random_pose(rng);
    const auto [pp, rr] = from_transform(t);
    EXPECT_EQ(to_transform(pp, rr), t);
  }
}

TEST(Transform, MatrixFormHasHomogeneousRow) {
  const Mat4 m = to_matrix(Pose{Vec3(1, 2, 3), rot_x(0.3)});
  EXPECT_EQ(m(3, 0), 0.0);
  EXPECT_EQ(m(3, 3), 1.0);
  EXPECT_EQ(m(2, 3), 3.0);
}

TEST(Rot6D, IdentityAndYaw90) {
  const auto id = rot_to_6d(Mat3::Identity()).values;
  EXPECT_EQ(id, (std::array<double, 6>{1, 0, 0, 0, 1, 0}));

  Mat3 yaw90;
  yaw90 << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_EQ(rot_to_6d(yaw90).values, (std::array<double, 6>{0, 1, 0, -1, 0, 0}));
}

TEST(Rot6D, RoundTripRandom) {
  Rng rng(15);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 r = random_rotation(rng);
    EXPECT_LE((rot_from_6d(rot_to_6d(r)) - r).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Rot6D, NoisyInputDecodesToRotationMatchingGramSchmidt) {
  Rng rng(16);
  for (int i = 0; i < 200; ++i) {
    auto v = rot_to_6d(random_rotation(rng));
    for (double& x : v.values) x += 1e-3 * rng.uniform(-1, 1);
    const Mat3 r = rot_from_6d(v);
    EXPECT_TRUE(is_rotation(r, 1e-9));

    // Textbook Gram-Schmidt written out component-wise.
    const auto& a = v.values;
    const double n1 = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    const double b1[3] = {a[0] / n1, a[1] / n1, a[2] / n1};
    const double d = b1[0] * a[3] + b1[1] * a[4] + b1[2] * a[5];
    double u[3] = {a[3] - d * b1[0], a[4] - d * b1[1], a[5] - d * b1[2]};
    const double n2 = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(r(k, 0), b1[k], 1e-14);
      EXPECT_NEAR(r(k, 1), u[k] / n2, 1e-14);
    }
  }
}

TEST(Rot6D, DegenerateColumnsThrow) {
  EXPECT_THROW(rot_from_6d(Rot6D{{0, 0, 0, 0, 1, 0}}), InvalidArgument);
  EXPECT_THROW(rot_from_6d(Rot6D{{1, 0, 0, 2, 0, 0}}), InvalidArgument);
  EXPECT_THROW(rot_from_6d(Rot6D{{1, 0, 0, 1, 1e-9, 0}}), InvalidArgument);
}

TEST(YawError, Examples) {
  EXPECT_EQ(yaw_error({1, 0}, {1, 0}), 0.0);
  EXPECT_NEAR(yaw_error({0, 1}, {1, 0}), kPi / 2, 1e-15);
  const double eps = 1e-3;
  const double e = yaw_error(Heading2D::from_vector(-1, eps), Heading2D::from_vector(-1, -eps));
  // atan2 difference is -(2 pi - 2 eps); wrapped it is -2 eps.
  EXPECT_NEAR(e, -2.0 * std::atan2(eps, 1.0), 1e-12);
}

TEST(YawError, RangeAndSelf) {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const auto a = Heading2D::from_yaw(rng.uniform(-10, 10));
    const auto b = Heading2D::from_yaw(rng.uniform(-10, 10));
    const double e = yaw_error(a, b);
    EXPECT_GT(e, -kPi);
    EXPECT_LE(e, kPi);
    EXPECT_EQ(yaw_error(a, a), 0.0);
  }
  EXPECT_EQ(wrap_angle(-kPi), kPi);
}

TEST(YawError, ZeroLengthThrows) {
  EXPECT_THROW(yaw_error({0, 0}, {1, 0}), InvalidArgument);
  EXPECT_THROW(Heading2D::from_vector(0, 0), InvalidArgument);
}

TEST(HeadingOf, Examples) {
  const auto h0 = heading_of(Pose::identity());
  EXPECT_EQ(h0.x, 1.0);
  EXPECT_EQ(h0.y, 0.0);
  const auto h90 = heading_of(pose_from_xyz_yaw(Vec3::Zero(), kPi / 2));
  EXPECT_NEAR(h90.x, 0.0, 1e-15);
  EXPECT_NEAR(h90.y, 1.0, 1e-15);

  const double yaw = deg_to_rad(30);
  const Pose tilted{Vec3::Zero(), rot_z(yaw) * rot_y(deg_to_rad(40))};
  const auto h = heading_of(tilted);
  EXPECT_NEAR(h.x, std::cos(yaw), 1e-12);
  EXPECT_NEAR(h.y, std::sin(yaw), 1e-12);
}

TEST(HeadingOf, VerticalForwardAxisThrows) {
  EXPECT_THROW(heading_of(Pose{Vec3::Zero(), rot_y(-kPi / 2)}), InvalidArgument);
}
