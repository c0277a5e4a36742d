#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "hsi/error.hpp"
#include "hsi/se3.hpp"

namespace hsi::task {

inline constexpr std::size_t kNumJoints = 29;
inline constexpr std::size_t kNumEndEffectors = 5;

using JointVector = std::array<double, kNumJoints>;

enum class EndEffector : std::size_t { LeftHand = 0, RightHand = 1, LeftFoot = 2, RightFoot = 3, Head = 4 };

enum class Task { CarryBox, SitDown, LieDown, StandUp, StyleLoco };

constexpr std::string_view to_string(Task t) {
  switch (t) {
    case Task::CarryBox: return "carry";
    case Task::SitDown: return "sit";
    case Task::LieDown: return "lie";
    case Task::StandUp: return "standup";
    case Task::StyleLoco: return "style_loco";
  }
  return "?";
}

inline Task parse_task(std::string_view s) {
  if (s == "carry") return Task::CarryBox;
  if (s == "sit") return Task::SitDown;
  if (s == "lie") return Task::LieDown;
  if (s == "standup") return Task::StandUp;
  if (s == "style_loco") return Task::StyleLoco;
  throw FormatError("unknown task: " + std::string(s));
}

/// Robot state at one control step.
///
/// Observations read base-frame quantities (`base_lin_vel`, `base_ang_vel`,
/// `gravity_dir`, `ee_pos`); rewards read world-frame ones (`base_pose`,
/// `base_lin_vel_world`).
struct RobotState {
  /// T_world_base.
  Pose base_pose;
  /// Base height above ground (m).
  double base_height = 0.0;
  Vec3 base_lin_vel = Vec3::Zero();
  Vec3 base_lin_vel_world = Vec3::Zero();
  Vec3 base_ang_vel = Vec3::Zero();
  /// Gravity direction in the base frame (unit).
  Vec3 gravity_dir = Vec3(0.0, 0.0, -1.0);
  JointVector joint_pos{};
  JointVector joint_vel{};
  /// Finite-difference joint acceleration, used only by regularization.
  JointVector joint_acc{};
  std::array<Vec3, kNumEndEffectors> ee_pos{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  JointVector prev_action{};
  JointVector torques{};

  const Vec3& ee(EndEffector e) const { return ee_pos[static_cast<std::size_t>(e)]; }
  Vec3& ee(EndEffector e) { return ee_pos[static_cast<std::size_t>(e)]; }

  void validate() const {
    if (std::abs(gravity_dir.norm() - 1.0) > 1e-6) throw InvalidArgument("RobotState: gravity_dir must be unit");
    if (!is_valid(base_pose, 1e-6)) throw InvalidArgument("RobotState: invalid base pose");
  }
};

/// Object and goal description for the current step.
struct SceneState {
  /// T_base_object.
  Pose object_pose;
  /// Bounding-box dimensions (m).
  Vec3 object_bbox = Vec3(0.3, 0.3, 0.3);
  /// Goal in the base frame.
  Vec3 goal_pos = Vec3::Zero();
  /// T_world_object.
  Pose object_world;
  Vec3 goal_world = Vec3::Zero();
  Heading2D object_heading;
  /// Mean of both hand positions, world frame.
  Vec3 hand_mid = Vec3::Zero();

  void validate() const {
    if (!(object_bbox.minCoeff() > 0)) throw InvalidArgument("SceneState: bbox components must be > 0");
  }
};

/// Planar velocity command for stylized locomotion (base frame).
struct VelocityCommand {
  double vx = 0.0;
  double vy = 0.0;
  double yaw_rate = 0.0;
};

/// Hand midpoint in the world frame.
inline Vec3 hand_midpoint_world(const RobotState& s) {
  return s.base_pose.transform_point(0.5 * (s.ee(EndEffector::LeftHand) + s.ee(EndEffector::RightHand)));
}

/// Fills the derived fields of a SceneState from world-frame object and goal.
inline SceneState make_scene(const RobotState& s, const Pose& object_world, const Vec3& goal_world,
                             const Vec3& bbox = Vec3(0.3, 0.3, 0.3)) {
  SceneState scene;
  const Pose world_to_base = inverse(s.base_pose);
  scene.object_world = object_world;
  scene.object_pose = compose(world_to_base, object_world);
  scene.goal_world = goal_world;
  scene.goal_pos = world_to_base.transform_point(goal_world);
  scene.object_bbox = bbox;
  scene.object_heading = heading_of(object_world);
  scene.hand_mid = hand_midpoint_world(s);
  return scene;
}

}  // namespace hsi::task
