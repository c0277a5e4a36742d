#pragma once

#include <cmath>

#include "hsi/task/rewards.hpp"

namespace hsi::task {

inline constexpr double kPlacementSuccessRadius = 0.1;
inline constexpr double kSeatSuccessRadius = 0.1;
inline constexpr double kAlignmentToleranceDeg = 15.0;
inline constexpr double kGoalSuccessRadius = 0.3;

/// Angle between two undirected lines in the plane, in [0, pi/2].
inline double line_angle(const Heading2D& a, const Heading2D& b) {
  const double d = std::abs(yaw_error(a, b));
  return std::min(d, kPi - d);
}

/// Final-state success test. All comparisons are strict.
///   carry:   |p_obj - p_goal| < 0.1
///   sit:     planar |p_base - p_seat| < 0.1 and |Δθ(d_seat, d_base)| < 15°
///   lie:     planar |p_base - p_bed| < 0.1 and the head-to-base axis within
///            15° of the bed's long axis
///   standup: base height > 0.72 and planar |p_base - p_goal| < 0.3
inline bool evaluate_success(Task task, const RobotState& s, const SceneState& scene) {
  const double tol = deg_to_rad(kAlignmentToleranceDeg);
  const Vec2 base_xy = s.base_pose.position.head<2>();
  switch (task) {
    case Task::CarryBox:
      return (scene.object_world.position - scene.goal_world).norm() < kPlacementSuccessRadius;
    case Task::SitDown:
      return (base_xy - scene.object_world.position.head<2>()).norm() < kSeatSuccessRadius &&
             std::abs(yaw_error(scene.object_heading, heading_of(s.base_pose))) < tol;
    case Task::LieDown:
      return (base_xy - scene.object_world.position.head<2>()).norm() < kSeatSuccessRadius &&
             line_angle(scene.object_heading.perpendicular(), head_to_base_direction(s)) < tol;
    case Task::StandUp:
      return s.base_pose.position.z() > kStandHeight &&
             (base_xy - scene.goal_world.head<2>()).norm() < kGoalSuccessRadius;
    case Task::StyleLoco:
      break;
  }
  throw InvalidArgument("evaluate_success: no success criterion for style_loco");
}

}  // namespace hsi::task
