#pragma once

#include <algorithm>
#include <cmath>

#include "hsi/task/types.hpp"

/// Staged task rewards. All positions and velocities are world frame.
namespace hsi::task {

/// Radius of the "near object" / "near goal" branches.
inline constexpr double kNearRadius = 0.7;
/// Target walking speed (m/s).
inline constexpr double kTargetSpeed = 0.85;
/// Box lift height at which the pick reward saturates (m).
inline constexpr double kLiftHeight = 0.75;
/// Placement tolerance for the put reward (m).
inline constexpr double kPlaceTolerance = 0.05;
/// Standing base height (m).
inline constexpr double kStandHeight = 0.72;

enum class LieBranches {
  /// Near-and-level guard returns the sit reward, otherwise the lying bonus.
  Standard,
  /// Guard returns the lying bonus, otherwise the sit reward.
  Swapped,
};

namespace detail {

inline Vec2 xy(const Vec3& v) { return v.head<2>(); }

/// exp(-rate * x) with the exponent clamped at zero, so a one-sided height
/// term never exceeds 1.
inline double saturating_exp(double exponent) { return std::exp(std::min(exponent, 0.0)); }

/// Direction from the base to `target` in the ground plane; falls back to the
/// base heading when the two coincide.
inline Heading2D direction_to(const RobotState& s, const Vec3& target) {
  const Vec2 d = xy(target) - xy(s.base_pose.position);
  if (d.norm() < 1e-9) return heading_of(s.base_pose);
  return Heading2D::from_vector(d.x(), d.y());
}

/// a·exp(-5 (0.85 - d·v)^2) + b·exp(-0.75 |Δθ(d, d_b)|)
inline double heading_speed_term(const RobotState& s, const Heading2D& dir, double speed_weight,
                                 double heading_weight) {
  const double along = dir.dot(s.base_lin_vel_world.x(), s.base_lin_vel_world.y());
  const double dtheta = yaw_error(dir, heading_of(s.base_pose));
  return speed_weight * std::exp(-5.0 * std::pow(kTargetSpeed - along, 2)) +
         heading_weight * std::exp(-0.75 * std::abs(dtheta));
}

inline double object_base_xy(const RobotState& s, const SceneState& scene) {
  return (xy(scene.object_world.position) - xy(s.base_pose.position)).norm();
}
inline double base_goal_xy(const RobotState& s, const SceneState& scene) {
  return (xy(s.base_pose.position) - xy(scene.goal_world)).norm();
}

}  // namespace detail

/// Walk toward the object.
inline double r_loco(const RobotState& s, const SceneState& scene) {
  if (detail::object_base_xy(s, scene) < kNearRadius) return 1.5;
  return detail::heading_speed_term(s, detail::direction_to(s, scene.object_world.position), 1.0, 0.5);
}

/// Carry toward the goal while holding the object at the hands.
inline double r_carry(const RobotState& s, const SceneState& scene) {
  if (detail::object_base_xy(s, scene) > kNearRadius) return 0.0;
  if (detail::base_goal_xy(s, scene) < kNearRadius) return 2.2;
  const double hold = (scene.object_world.position - scene.hand_mid).squaredNorm();
  return detail::heading_speed_term(s, detail::direction_to(s, scene.goal_world), 1.0, 0.5) +
         0.7 * std::exp(-3.0 * hold);
}

/// Lift the object.
inline double r_pick(const RobotState& s, const SceneState& scene) {
  if (detail::object_base_xy(s, scene) > kNearRadius) return 0.0;
  const double z = scene.object_world.position.z();
  if (detail::base_goal_xy(s, scene) < kNearRadius || z > kLiftHeight) return 2.0;
  return 2.0 * std::exp(-3.0 * std::abs(kLiftHeight - z));
}

/// Place the object at the goal. The height term saturates at 1 when the
/// object is below the goal.
inline double r_put(const RobotState& s, const SceneState& scene) {
  if (detail::base_goal_xy(s, scene) > kNearRadius) return 0.0;
  const Vec3 err = scene.object_world.position - scene.goal_world;
  const double dist = err.norm();
  if (dist < kPlaceTolerance) return 2.0;
  return std::exp(-10.0 * dist) + detail::saturating_exp(-3.0 * err.z());
}

/// Sit on the seat. The height term saturates at 1 when the base is above
/// the seat surface.
inline double r_sit(const RobotState& s, const SceneState& scene) {
  if (detail::object_base_xy(s, scene) > kNearRadius) return 0.0;
  const Vec3& po = scene.object_world.position;
  const Vec3& pb = s.base_pose.position;
  const double dtheta = yaw_error(scene.object_heading, heading_of(s.base_pose));
  return std::exp(-3.0 * (po - pb).norm()) + detail::saturating_exp(-5.0 * (po.z() - pb.z())) +
         std::exp(-0.75 * std::abs(dtheta));
}

/// Horizontal unit vector from the head to the base. When the body is upright
/// the projection vanishes and the base heading is used instead.
inline Heading2D head_to_base_direction(const RobotState& s) {
  const Vec3 head = s.base_pose.transform_point(s.ee(EndEffector::Head));
  const Vec2 d = detail::xy(s.base_pose.position) - detail::xy(head);
  if (d.norm() < 1e-6) return heading_of(s.base_pose);
  return Heading2D::from_vector(d.x(), d.y());
}

/// 3.0 + 0.5 exp(-0.75 |z_world · z_base|) + 0.5 exp(-2 |Δθ(d_obj⊥, d_head→base)|)
inline double lie_bonus(const RobotState& s, const SceneState& scene) {
  const double up_dot = Vec3::UnitZ().dot(s.base_pose.rotation.col(2));
  const double dtheta = yaw_error(scene.object_heading.perpendicular(), head_to_base_direction(s));
  return 3.0 + 0.5 * std::exp(-0.75 * std::abs(up_dot)) + 0.5 * std::exp(-2.0 * std::abs(dtheta));
}

inline bool lie_guard(const RobotState& s, const SceneState& scene) {
  const Vec3& po = scene.object_world.position;
  const Vec3& pb = s.base_pose.position;
  return detail::object_base_xy(s, scene) < 0.3 && (po.z() - pb.z()) < 0.05;
}

inline double r_lie(const RobotState& s, const SceneState& scene, LieBranches branches = LieBranches::Standard) {
  const bool guard = lie_guard(s, scene);
  const bool use_sit = branches == LieBranches::Standard ? guard : !guard;
  return use_sit ? r_sit(s, scene) : lie_bonus(s, scene);
}

/// Rise to standing height.
inline double r_standup(const RobotState& s) {
  const double z = s.base_pose.position.z();
  if (z > kStandHeight) return 3.0;
  return 3.0 * std::exp(-5.0 * (kStandHeight - z));
}

/// Walk toward the goal after standing.
inline double r_loco_tar(const RobotState& s, const SceneState& scene) {
  return detail::heading_speed_term(s, detail::direction_to(s, scene.goal_world), 0.5, 0.5);
}

/// Velocity tracking in the base frame.
inline double r_style_loco(const RobotState& s, const VelocityCommand& cmd) {
  const double dvx = s.base_lin_vel.x() - cmd.vx;
  const double dvy = s.base_lin_vel.y() - cmd.vy;
  const double dw = s.base_ang_vel.z() - cmd.yaw_rate;
  return std::exp(-4.0 * (dvx * dvx + dvy * dvy)) + 0.5 * std::exp(-4.0 * dw * dw);
}

// ----------------------------------------------------------------------------
// Regularization
// ----------------------------------------------------------------------------

struct JointLimits {
  JointVector pos_lower{};
  JointVector pos_upper{};
  JointVector vel_limit{};
  JointVector torque_limit{};

  static JointLimits uniform(double pos, double vel, double torque) {
    JointLimits l;
    l.pos_lower.fill(-pos);
    l.pos_upper.fill(pos);
    l.vel_limit.fill(vel);
    l.torque_limit.fill(torque);
    return l;
  }
};

struct RegularizationWeights {
  double dof_vel = -2e-4;
  double torques = -1e-4;
  double dof_acc = -1e-7;
  double torque_limits = -0.1;
  double dof_pos_limits = -5.0;
  double action_rate = -0.03;
  double dof_vel_limits = -1e-3;
};

/// Weighted penalty terms. Quadratic sums for velocity, acceleration, torque
/// and action rate; summed excess beyond the limit for the three limit terms.
struct RegularizationTerms {
  double dof_vel = 0;
  double torques = 0;
  double dof_acc = 0;
  double torque_limits = 0;
  double dof_pos_limits = 0;
  double action_rate = 0;
  double dof_vel_limits = 0;

  double total() const {
    return dof_vel + torques + dof_acc + torque_limits + dof_pos_limits + action_rate + dof_vel_limits;
  }
};

inline RegularizationTerms regularization_terms(const RobotState& s, const JointVector& prev_action,
                                                const JointVector& action, const JointLimits& limits,
                                                const RegularizationWeights& w = {}) {
  double vel_sq = 0, tau_sq = 0, acc_sq = 0, tau_excess = 0, pos_excess = 0, rate_sq = 0, vel_excess = 0;
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    vel_sq += s.joint_vel[j] * s.joint_vel[j];
    tau_sq += s.torques[j] * s.torques[j];
    acc_sq += s.joint_acc[j] * s.joint_acc[j];
    tau_excess += std::max(std::abs(s.torques[j]) - limits.torque_limit[j], 0.0);
    pos_excess += std::max(limits.pos_lower[j] - s.joint_pos[j], 0.0) +
                  std::max(s.joint_pos[j] - limits.pos_upper[j], 0.0);
    const double da = action[j] - prev_action[j];
    rate_sq += da * da;
    vel_excess += std::max(std::abs(s.joint_vel[j]) - limits.vel_limit[j], 0.0);
  }
  return {w.dof_vel * vel_sq,        w.torques * tau_sq,       w.dof_acc * acc_sq,
          w.torque_limits * tau_excess, w.dof_pos_limits * pos_excess, w.action_rate * rate_sq,
          w.dof_vel_limits * vel_excess};
}

inline double r_regularization(const RobotState& s, const JointVector& prev_action, const JointVector& action,
                               const JointLimits& limits, const RegularizationWeights& w = {}) {
  return regularization_terms(s, prev_action, action, limits, w).total();
}

}  // namespace hsi::task
