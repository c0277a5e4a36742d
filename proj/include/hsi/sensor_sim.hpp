#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsi/error.hpp"
#include "hsi/random.hpp"
#include "hsi/se3.hpp"

/// Deterministic simulated sensors for exercising the localizer: LiDAR-style
/// odometry with drift, a torso-mounted camera with field-of-view gating, and
/// noisy fiducial detections.
namespace hsi::sim {

/// Simulation time step (50 Hz).
inline constexpr double kDefaultDt = 0.02;

struct CameraModel {
  double h_fov_deg = 86.0;
  double v_fov_deg = 57.0;
  /// Mount position in the torso (base) frame.
  Vec3 mount_offset = Vec3(0.08, 0.01, 0.40);
  /// Downward pitch of the optical axis.
  double mount_pitch_deg = 40.0;
  double max_range = 2.5;
  /// Maximum angle between the tag normal and the direction to the camera.
  double facing_limit_deg = 60.0;
  /// The facing limit is perturbed per episode by U(-range, range).
  double facing_jitter_range_deg = 10.0;

  void validate() const {
    if (!(h_fov_deg > 0 && h_fov_deg < 180) || !(v_fov_deg > 0 && v_fov_deg < 180)) {
      throw InvalidArgument("camera: fov must be in (0, 180) degrees");
    }
    if (!(max_range > 0)) throw InvalidArgument("camera: max_range must be > 0");
    if (!(facing_jitter_range_deg >= 0)) throw InvalidArgument("camera: facing_jitter_range must be >= 0");
    if (!mount_offset.allFinite() || !std::isfinite(mount_pitch_deg)) throw InvalidArgument("camera: non-finite mount");
  }

  /// T_base_camera. The camera frame shares the base convention: +x is the
  /// optical axis, +y left, +z up. Positive pitch tilts the axis downward.
  Pose mount() const { return to_transform(mount_offset, rot_y(deg_to_rad(mount_pitch_deg))); }
};

struct OdometryModel {
  /// Translation scale error, as a fraction of distance traveled.
  double drift_rate = 0.005;
  /// Heading random-walk intensity, rad per meter traveled.
  double heading_drift_rate = 0.001;
  /// Per-step isotropic translation noise (m).
  double per_step_noise_sigma = 0.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(drift_rate >= 0) || !(heading_drift_rate >= 0) || !(per_step_noise_sigma >= 0)) {
      throw InvalidArgument("odometry: parameters must be >= 0");
    }
  }
  bool exact() const { return drift_rate == 0 && heading_drift_rate == 0 && per_step_noise_sigma == 0; }
};

struct TagModel {
  double position_noise_sigma = 0.02;
  double rotation_noise_sigma_deg = 2.0;
  double dropout_prob = 0.0;
  std::uint64_t seed = 2;
  /// Tag center sits on the object's +x face, this far from the object origin.
  double face_offset = 0.15;
  /// Side length of the square tag.
  double tag_size = 0.10;

  void validate() const {
    if (!(position_noise_sigma >= 0) || !(rotation_noise_sigma_deg >= 0)) {
      throw InvalidArgument("tags: sigmas must be >= 0");
    }
    if (!(dropout_prob >= 0 && dropout_prob <= 1)) throw InvalidArgument("tags: dropout_prob must be in [0, 1]");
    if (!(face_offset >= 0) || !(tag_size > 0)) throw InvalidArgument("tags: invalid geometry");
  }
  bool exact() const { return position_noise_sigma == 0 && rotation_noise_sigma_deg == 0 && dropout_prob == 0; }
};

struct SensorScene {
  std::vector<Pose> robot_gt;   // world <- base
  std::vector<Pose> object_gt;  // world <- object
  CameraModel camera;
  OdometryModel odom;
  TagModel tags;
  double dt = kDefaultDt;
  /// Per-episode offset of the facing limit (degrees).
  double facing_jitter_deg = 0.0;

  std::size_t size() const { return robot_gt.size(); }

  void validate() const {
    if (robot_gt.empty()) throw InvalidArgument("scene: empty trajectory");
    if (robot_gt.size() != object_gt.size()) throw InvalidArgument("scene: robot/object sequences differ in length");
    if (!(dt > 0)) throw InvalidArgument("scene: dt must be > 0");
    camera.validate();
    odom.validate();
    tags.validate();
  }
};

// ----------------------------------------------------------------------------
// Odometry
// ----------------------------------------------------------------------------

/// T_b0_bt for every step. Each ground-truth increment is corrupted by a
/// proportional translation scale error, a heading random walk scaled by the
/// distance of the increment, and optional isotropic noise; the corrupted
/// increments are chained. A zero model reproduces inverse(gt_0) * gt_t.
inline std::vector<Pose> simulate_odometry(const SensorScene& scene) {
  if (scene.robot_gt.empty()) throw InvalidArgument("simulate_odometry: empty trajectory");
  scene.odom.validate();
  const auto& gt = scene.robot_gt;
  std::vector<Pose> out;
  out.reserve(gt.size());
  const Pose world_to_base0 = inverse(gt.front());
  if (scene.odom.exact()) {
    for (const auto& g : gt) out.push_back(compose(world_to_base0, g));
    return out;
  }
  Rng rng(derive_seed(scene.odom.seed, hash_name("odometry")));
  out.push_back(compose(world_to_base0, gt.front()));
  for (std::size_t t = 1; t < gt.size(); ++t) {
    const Pose delta = compose(inverse(gt[t - 1]), gt[t]);
    const double ds = delta.position.head<2>().norm();
    const double dpsi = scene.odom.heading_drift_rate * ds * rng.normal();
    const Vec3 noise(rng.normal(), rng.normal(), rng.normal());
    Pose noisy;
    noisy.position = (1.0 + scene.odom.drift_rate) * delta.position + scene.odom.per_step_noise_sigma * noise;
    noisy.rotation = rot_z(dpsi) * delta.rotation;
    out.push_back(compose(out.back(), noisy));
  }
  return out;
}

// ----------------------------------------------------------------------------
// Camera geometry and visibility
// ----------------------------------------------------------------------------

/// T_world_camera for a base pose T_world_base.
inline Pose camera_pose(const Pose& base, const CameraModel& camera) { return compose(base, camera.mount()); }

inline Vec3 tag_center(const Pose& object, const TagModel& tags) {
  return object.transform_point(Vec3(tags.face_offset, 0.0, 0.0));
}

/// Outward normal of the tagged face.
inline Vec3 tag_normal(const Pose& object) { return object.rotation.col(0); }

inline std::array<Vec3, 4> tag_corners(const Pose& object, const TagModel& tags) {
  const double h = 0.5 * tags.tag_size;
  const double f = tags.face_offset;
  return {object.transform_point(Vec3(f, h, h)), object.transform_point(Vec3(f, -h, h)),
          object.transform_point(Vec3(f, -h, -h)), object.transform_point(Vec3(f, h, -h))};
}

struct VisibilityReport {
  bool facing = false;
  bool in_fov = false;
  bool in_range = false;
  double facing_angle_deg = 0.0;
  double distance = 0.0;

  bool visible() const { return facing && in_fov && in_range; }
};

/// Evaluates the facing, field-of-view, and distance conditions for the tag on
/// `object` seen from `cam` (T_world_camera).
inline VisibilityReport check_visibility(const Pose& cam, const Pose& object, const CameraModel& camera,
                                         double jitter_deg, const TagModel& tags = {}) {
  if (std::abs(jitter_deg) > camera.facing_jitter_range_deg) {
    throw InvalidArgument("visibility: |jitter| exceeds facing_jitter_range");
  }
  VisibilityReport r;
  const Vec3 center = tag_center(object, tags);
  const Vec3 to_camera = cam.position - center;
  r.distance = to_camera.norm();
  r.in_range = r.distance <= camera.max_range;

  if (r.distance > 0) {
    const double c = std::clamp(tag_normal(object).dot(to_camera) / r.distance, -1.0, 1.0);
    r.facing_angle_deg = rad_to_deg(std::acos(c));
  }
  r.facing = r.facing_angle_deg <= camera.facing_limit_deg + jitter_deg;

  const double tan_h = std::tan(deg_to_rad(0.5 * camera.h_fov_deg));
  const double tan_v = std::tan(deg_to_rad(0.5 * camera.v_fov_deg));
  const Pose world_to_camera = inverse(cam);
  r.in_fov = true;
  for (const Vec3& corner : tag_corners(object, tags)) {
    const Vec3 q = world_to_camera.transform_point(corner);
    if (!(q.x() > 0 && std::abs(q.y()) <= q.x() * tan_h && std::abs(q.z()) <= q.x() * tan_v)) {
      r.in_fov = false;
      break;
    }
  }
  return r;
}

inline bool visibility(const Pose& cam, const Pose& object, const CameraModel& camera, double jitter_deg,
                       const TagModel& tags = {}) {
  return check_visibility(cam, object, camera, jitter_deg, tags).visible();
}

// ----------------------------------------------------------------------------
// Fiducial detections
// ----------------------------------------------------------------------------

/// Ground-truth T_ct_ot at step t.
inline Pose true_detection(const SensorScene& scene, std::size_t t) {
  return compose(inverse(camera_pose(scene.robot_gt.at(t), scene.camera)), scene.object_gt.at(t));
}

/// Simulated detection at step t. The random draw is a pure function of
/// (tags.seed, t), so calls may happen in any order.
inline std::optional<Pose> simulate_detection(const SensorScene& scene, std::size_t t, bool visible) {
  if (t >= scene.size()) throw InvalidArgument("simulate_detection: step out of range");
  if (!visible) return std::nullopt;
  const TagModel& tags = scene.tags;
  Rng rng(derive_seed(tags.seed, t));
  const bool dropped = rng.uniform01() < tags.dropout_prob;
  if (dropped) return std::nullopt;
  Pose det = true_detection(scene, t);
  if (tags.position_noise_sigma > 0) {
    det.position += tags.position_noise_sigma * Vec3(rng.normal(), rng.normal(), rng.normal());
  }
  if (tags.rotation_noise_sigma_deg > 0) {
    const Vec3 rv = deg_to_rad(tags.rotation_noise_sigma_deg) * Vec3(rng.normal(), rng.normal(), rng.normal());
    const double angle = rv.norm();
    if (angle > 0) det.rotation = det.rotation * Eigen::AngleAxisd(angle, rv / angle).toRotationMatrix();
  }
  return det;
}

// ----------------------------------------------------------------------------
// Scripted trajectories
// ----------------------------------------------------------------------------

enum class TrajectoryKind { Approach, ApproachTurnSit, ApproachCarry };

constexpr std::string_view to_string(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::Approach: return "approach";
    case TrajectoryKind::ApproachTurnSit: return "approach_turn_sit";
    case TrajectoryKind::ApproachCarry: return "approach_carry";
  }
  return "?";
}

inline TrajectoryKind parse_trajectory_kind(std::string_view s) {
  if (s == "approach") return TrajectoryKind::Approach;
  if (s == "approach_turn_sit") return TrajectoryKind::ApproachTurnSit;
  if (s == "approach_carry") return TrajectoryKind::ApproachCarry;
  throw FormatError("unknown trajectory kind: " + std::string(s));
}

struct TrajectoryParams {
  Vec2 start_xy = Vec2::Zero();
  double start_yaw = 0.0;
  /// World pose of the object at rest; z is the object origin height.
  Vec3 object_position = Vec3(5.0, 0.0, 0.45);
  double object_yaw = kPi;
  /// Carry target for the object origin.
  Vec3 goal_position = Vec3(3.0, 3.0, 0.45);

  double speed = 0.85;       // m/s, walking
  double turn_rate = 1.0;    // rad/s, in-place turns
  double base_height = 0.75;
  double dt = kDefaultDt;

  /// approach / approach_carry: planar base-to-object distance at the stop.
  double stop_distance = 0.45;
  /// approach_turn_sit: stand-off in front of the seat before turning.
  double stand_off = 0.6;
  double sit_speed = 0.3;
  /// Base height above the seat surface once seated.
  double seated_base_offset = 0.1;

  double pick_duration = 1.0;
  double place_duration = 1.0;
  /// Object origin in the base frame while carried.
  Vec3 hold_offset = Vec3(0.30, 0.0, -0.30);
};

namespace detail {

inline Mat3 slerp(const Mat3& a, const Mat3& b, double s) {
  const Eigen::Quaterniond qa(a);
  const Eigen::Quaterniond qb(b);
  return qa.slerp(s, qb).toRotationMatrix();
}

/// Accumulates base and object poses one step at a time.
class TrajectoryBuilder {
 public:
  TrajectoryBuilder(const TrajectoryParams& p, const Pose& object)
      : p_(p), base_(pose_from_xyz_yaw(Vec3(p.start_xy.x(), p.start_xy.y(), p.base_height), p.start_yaw)),
        object_(object) {
    push();
  }

  /// Turns in place to `yaw`, ending exactly on it.
  void turn_to(double yaw) {
    const double current = yaw_of(base_.rotation);
    const double delta = wrap_angle(yaw - current);
    const auto n = static_cast<std::size_t>(std::ceil(std::abs(delta) / (p_.turn_rate * p_.dt) - 1e-12));
    for (std::size_t i = 1; i <= n; ++i) {
      const double y = (i == n) ? yaw : current + delta * static_cast<double>(i) / static_cast<double>(n);
      base_.rotation = rot_z(y);
      advance();
    }
  }

  /// Straight-line planar move at `speed`, heading unchanged; base height
  /// interpolates linearly to `height`.
  void move_to(const Vec2& xy, double speed, double height) {
    const Vec3 from = base_.position;
    const Vec3 to(xy.x(), xy.y(), height);
    const double length = (to.head<2>() - from.head<2>()).norm();
    const auto n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(length / (speed * p_.dt) - 1e-12)));
    for (std::size_t i = 1; i <= n; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(n);
      base_.position = (i == n) ? to : Vec3(from + s * (to - from));
      advance();
    }
  }

  void walk_to(const Vec2& xy) {
    const Vec2 d = xy - base_.position.head<2>();
    if (d.norm() > 1e-12) turn_to(std::atan2(d.y(), d.x()));
    move_to(xy, p_.speed, base_.position.z());
  }

  /// Base stationary while the object moves from its current pose to `target`.
  void move_object_to(const Pose& target, double duration) {
    const Pose from = object_;
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(duration / p_.dt - 1e-12)));
    for (std::size_t i = 1; i <= n; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(n);
      if (i == n) {
        object_ = target;
      } else {
        object_.position = from.position + s * (target.position - from.position);
        object_.rotation = slerp(from.rotation, target.rotation, s);
      }
      push();
    }
  }

  void attach() { attached_ = compose(inverse(base_), object_); }
  void attach(const Pose& relative) { attached_ = relative; object_ = compose(base_, relative); }
  void detach() { attached_.reset(); }

  const Pose& base() const { return base_; }
  const Pose& object() const { return object_; }

  SensorScene finish() && {
    SensorScene scene;
    scene.robot_gt = std::move(robot_);
    scene.object_gt = std::move(objects_);
    scene.dt = p_.dt;
    return scene;
  }

 private:
  void advance() {
    if (attached_) object_ = compose(base_, *attached_);
    push();
  }
  void push() {
    robot_.push_back(base_);
    objects_.push_back(object_);
  }

  TrajectoryParams p_;
  Pose base_;
  Pose object_;
  std::optional<Pose> attached_;
  std::vector<Pose> robot_;
  std::vector<Pose> objects_;
};

}  // namespace detail

/// Builds a smooth scripted episode: in-place turns at `turn_rate` and
/// constant-speed straight segments. Sensor models are left at defaults.
inline SensorScene scripted_trajectory(TrajectoryKind kind, const TrajectoryParams& p) {
  if (!(p.speed > 0) || !(p.turn_rate > 0) || !(p.dt > 0) || !(p.sit_speed > 0)) {
    throw InvalidArgument("scripted_trajectory: speeds and dt must be > 0");
  }
  if (!(p.pick_duration > 0) || !(p.place_duration > 0)) {
    throw InvalidArgument("scripted_trajectory: durations must be > 0");
  }
  const Pose object = pose_from_xyz_yaw(p.object_position, p.object_yaw);
  const Vec2 object_xy = p.object_position.head<2>();
  const double start_distance = (object_xy - p.start_xy).norm();
  detail::TrajectoryBuilder b(p, object);

  switch (kind) {
    case TrajectoryKind::Approach: {
      if (!(p.stop_distance >= 0) || start_distance <= p.stop_distance) {
        throw InvalidArgument("scripted_trajectory: start is already within stop_distance");
      }
      const Vec2 dir = (object_xy - p.start_xy) / start_distance;
      b.walk_to(object_xy - p.stop_distance * dir);
      break;
    }
    case TrajectoryKind::ApproachTurnSit: {
      const Heading2D facing = heading_of(object);
      const Vec2 pre_sit = object_xy + p.stand_off * Vec2(facing.x, facing.y);
      if ((pre_sit - p.start_xy).norm() <= 1e-9) {
        throw InvalidArgument("scripted_trajectory: start coincides with the pre-sit point");
      }
      if (!(p.seated_base_offset > 0) || p.object_position.z() + p.seated_base_offset > p.base_height) {
        throw InvalidArgument("scripted_trajectory: seat too high for base height");
      }
      b.walk_to(pre_sit);
      b.turn_to(facing.yaw());
      b.move_to(object_xy, p.sit_speed, p.object_position.z() + p.seated_base_offset);
      break;
    }
    case TrajectoryKind::ApproachCarry: {
      if (!(p.stop_distance >= 0) || start_distance <= p.stop_distance) {
        throw InvalidArgument("scripted_trajectory: start is already within stop_distance");
      }
      const Vec2 dir = (object_xy - p.start_xy) / start_distance;
      b.walk_to(object_xy - p.stop_distance * dir);

      // Lift into the hands, keeping the object's orientation relative to the base.
      const Pose relative = compose(inverse(b.base()), b.object());
      const Pose held_rel{p.hold_offset, relative.rotation};
      b.move_object_to(compose(b.base(), held_rel), p.pick_duration);
      b.attach(held_rel);

      // Carry so the held object ends above the goal.
      const Vec2 goal_xy = p.goal_position.head<2>();
      const Vec2 to_goal = goal_xy - b.base().position.head<2>();
      if (to_goal.norm() <= std::abs(p.hold_offset.x()) + 1e-9) {
        throw InvalidArgument("scripted_trajectory: goal too close to pickup");
      }
      const Vec2 goal_dir = to_goal.normalized();
      b.walk_to(goal_xy - p.hold_offset.x() * goal_dir);
      b.detach();
      b.move_object_to(to_transform(p.goal_position, b.object().rotation), p.place_duration);
      break;
    }
  }
  SensorScene scene = std::move(b).finish();
  return scene;
}

}  // namespace hsi::sim
