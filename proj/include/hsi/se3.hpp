#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "hsi/error.hpp"

namespace hsi {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }

/// Body axis treated as "forward" when projecting headings. The base frame is
/// x forward, y left, z up.
inline constexpr int kForwardAxis = 0;

/// Tolerance used when validating that a matrix is a proper rotation.
inline constexpr double kRotationTolerance = 1e-9;

// ----------------------------------------------------------------------------
// Rotations
// ----------------------------------------------------------------------------

inline Mat3 rot_x(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitX()).toRotationMatrix(); }
inline Mat3 rot_y(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitY()).toRotationMatrix(); }
inline Mat3 rot_z(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix(); }

/// RᵀR = I and det R = +1, both within `tol`.
inline bool is_rotation(const Mat3& r, double tol = kRotationTolerance) {
  if (!r.allFinite()) return false;
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

/// Yaw of the body forward axis projected onto the ground plane.
inline double yaw_of(const Mat3& r) { return std::atan2(r(1, kForwardAxis), r(0, kForwardAxis)); }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

// ----------------------------------------------------------------------------
// Pose
// ----------------------------------------------------------------------------

/// Rigid transform. Maps points of the child frame into the parent frame:
/// x_parent = rotation * x_child + position.
struct Pose {
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();

  static Pose identity() { return {}; }

  bool operator==(const Pose& other) const {
    return position == other.position && rotation == other.rotation;
  }

  Vec3 transform_point(const Vec3& p) const { return rotation * p + position; }
};

inline Pose translate(double x, double y, double z) { return {Vec3(x, y, z), Mat3::Identity()}; }

inline Pose pose_from_xyz_yaw(const Vec3& p, double yaw) { return {p, rot_z(yaw)}; }

/// a then b: the homogeneous product T_a * T_b.
inline Pose compose(const Pose& a, const Pose& b) {
  return {a.rotation * b.position + a.position, a.rotation * b.rotation};
}

inline Pose inverse(const Pose& a) {
  const Mat3 rt = a.rotation.transpose();
  return {-(rt * a.position), rt};
}

/// Position and orientation to transform.
inline Pose to_transform(const Vec3& p, const Mat3& r) { return {p, r}; }

/// Transform back to (position, orientation). Exact inverse of to_transform.
inline std::pair<Vec3, Mat3> from_transform(const Pose& t) { return {t.position, t.rotation}; }

inline Mat4 to_matrix(const Pose& t) {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = t.rotation;
  m.topRightCorner<3, 1>() = t.position;
  return m;
}

inline bool is_valid(const Pose& t, double tol = kRotationTolerance) {
  return t.position.allFinite() && is_rotation(t.rotation, tol);
}

/// Largest absolute entry difference of the 4x4 forms.
inline double max_abs_diff(const Pose& a, const Pose& b) {
  return std::max((a.position - b.position).cwiseAbs().maxCoeff(),
                  (a.rotation - b.rotation).cwiseAbs().maxCoeff());
}

// ----------------------------------------------------------------------------
// 6D rotation encoding
// ----------------------------------------------------------------------------

/// First two columns of a rotation matrix, column-major:
/// (c0.x, c0.y, c0.z, c1.x, c1.y, c1.z).
struct Rot6D {
  std::array<double, 6> values{};

  Vec3 first() const { return {values[0], values[1], values[2]}; }
  Vec3 second() const { return {values[3], values[4], values[5]}; }
};

inline Rot6D rot_to_6d(const Mat3& r) {
  return {{r(0, 0), r(1, 0), r(2, 0), r(0, 1), r(1, 1), r(2, 1)}};
}

/// Gram-Schmidt on column 1 then column 2; the third column is their cross
/// product. Throws on near-zero or near-parallel columns.
inline Mat3 rot_from_6d(const Rot6D& v) {
  constexpr double kMinNorm = 1e-9;
  constexpr double kMinSine = 1e-6;
  const Vec3 a1 = v.first();
  const Vec3 a2 = v.second();
  if (!a1.allFinite() || !a2.allFinite()) throw InvalidArgument("rot_from_6d: non-finite input");
  const double n1 = a1.norm();
  const double n2 = a2.norm();
  if (n1 < kMinNorm || n2 < kMinNorm) throw InvalidArgument("rot_from_6d: near-zero column");
  const Vec3 b1 = a1 / n1;
  const Vec3 u2 = a2 - b1.dot(a2) * b1;
  const double m2 = u2.norm();
  if (m2 < kMinSine * n2) throw InvalidArgument("rot_from_6d: near-parallel columns");
  const Vec3 b2 = u2 / m2;
  Mat3 r;
  r.col(0) = b1;
  r.col(1) = b2;
  r.col(2) = b1.cross(b2);
  return r;
}

// ----------------------------------------------------------------------------
// Planar headings
// ----------------------------------------------------------------------------

/// Unit vector in the horizontal plane.
struct Heading2D {
  double x = 1.0;
  double y = 0.0;

  /// Normalizes (x, y); throws if the vector is (near) zero.
  static Heading2D from_vector(double x, double y) {
    const double n = std::hypot(x, y);
    if (!(n > 1e-12) || !std::isfinite(n)) throw InvalidArgument("Heading2D: zero-length vector");
    return {x / n, y / n};
  }
  static Heading2D from_yaw(double yaw) { return {std::cos(yaw), std::sin(yaw)}; }

  double yaw() const { return std::atan2(y, x); }
  /// Rotated by +90 degrees.
  Heading2D perpendicular() const { return {-y, x}; }
  double dot(double vx, double vy) const { return x * vx + y * vy; }
};

/// atan2(a) - atan2(b), wrapped into (-pi, pi].
inline double yaw_error(const Heading2D& a, const Heading2D& b) {
  constexpr double kMinNorm = 1e-12;
  if (!(std::hypot(a.x, a.y) > kMinNorm) || !(std::hypot(b.x, b.y) > kMinNorm)) {
    throw InvalidArgument("yaw_error: zero-length heading");
  }
  return wrap_angle(std::atan2(a.y, a.x) - std::atan2(b.y, b.x));
}

/// Normalized horizontal projection of the body forward axis.
inline Heading2D heading_of(const Pose& pose) {
  const double fx = pose.rotation(0, kForwardAxis);
  const double fy = pose.rotation(1, kForwardAxis);
  const double n = std::hypot(fx, fy);
  if (!(n >= 1e-6)) throw InvalidArgument("heading_of: forward axis is vertical");
  return {fx / n, fy / n};
}

}  // namespace hsi
