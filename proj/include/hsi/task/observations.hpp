#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

#include "hsi/task/types.hpp"

namespace hsi::task {

inline constexpr std::size_t kProprioDim = 108;
inline constexpr std::size_t kDiscDim = 57;

using ProprioObs = std::array<double, kProprioDim>;
using DiscObs = std::array<double, kDiscDim>;

/// Slot offsets. Proprioception: [ω(3), g(3), θ(29), θ̇(29), p_ee(15), a_prev(29)].
/// Discriminator: [h(1), v(3), ω(3), g(3), θ(29), p_ee(15), p_obj(3)].
namespace layout {
inline constexpr std::size_t kProprioAngVel = 0;
inline constexpr std::size_t kProprioGravity = 3;
inline constexpr std::size_t kProprioJointPos = 6;
inline constexpr std::size_t kProprioJointVel = kProprioJointPos + kNumJoints;
inline constexpr std::size_t kProprioEndEffectors = kProprioJointVel + kNumJoints;
inline constexpr std::size_t kProprioPrevAction = kProprioEndEffectors + 3 * kNumEndEffectors;
static_assert(kProprioPrevAction + kNumJoints == kProprioDim);

inline constexpr std::size_t kDiscHeight = 0;
inline constexpr std::size_t kDiscLinVel = 1;
inline constexpr std::size_t kDiscAngVel = 4;
inline constexpr std::size_t kDiscGravity = 7;
inline constexpr std::size_t kDiscJointPos = 10;
inline constexpr std::size_t kDiscEndEffectors = kDiscJointPos + kNumJoints;
inline constexpr std::size_t kDiscObject = kDiscEndEffectors + 3 * kNumEndEffectors;
static_assert(kDiscObject + 3 == kDiscDim);
}  // namespace layout

namespace detail {
template <typename Out>
std::size_t put(Out& out, std::size_t at, const Vec3& v) {
  out[at] = v.x();
  out[at + 1] = v.y();
  out[at + 2] = v.z();
  return at + 3;
}
template <typename Out, typename Range>
std::size_t put_range(Out& out, std::size_t at, const Range& r) {
  std::copy(r.begin(), r.end(), out.begin() + static_cast<std::ptrdiff_t>(at));
  return at + r.size();
}
}  // namespace detail

inline ProprioObs build_proprio(const RobotState& s) {
  ProprioObs o{};
  std::size_t i = 0;
  i = detail::put(o, i, s.base_ang_vel);
  i = detail::put(o, i, s.gravity_dir);
  i = detail::put_range(o, i, s.joint_pos);
  i = detail::put_range(o, i, s.joint_vel);
  for (const Vec3& p : s.ee_pos) i = detail::put(o, i, p);
  i = detail::put_range(o, i, s.prev_action);
  return o;
}

inline DiscObs build_disc_obs(const RobotState& s, const SceneState& scene) {
  DiscObs o{};
  std::size_t i = 0;
  o[i++] = s.base_height;
  i = detail::put(o, i, s.base_lin_vel);
  i = detail::put(o, i, s.base_ang_vel);
  i = detail::put(o, i, s.gravity_dir);
  i = detail::put_range(o, i, s.joint_pos);
  for (const Vec3& p : s.ee_pos) i = detail::put(o, i, p);
  detail::put(o, i, scene.object_pose.position);
  return o;
}

constexpr std::size_t task_obs_size(Task task) {
  switch (task) {
    case Task::CarryBox: return 15;
    case Task::SitDown:
    case Task::LieDown: return 9;
    case Task::StandUp: return 12;
    case Task::StyleLoco: return 3;
  }
  return 0;
}

/// Task observation in the base frame.
///   carry:      [bbox(3), p_obj(3), R_obj 6D(6), p_goal(3)]
///   sit / lie:  [p_obj(3), R_obj 6D(6)]
///   standup:    [p_obj(3), R_obj 6D(6), p_goal(3)]
///   style_loco: [vx_cmd, vy_cmd, yaw_rate_cmd]
/// `mask` zero-fills the object position and rotation slots; it is only
/// meaningful for carry (the only task with a dynamic object).
inline std::vector<double> build_task_obs(Task task, const RobotState& /*s*/, const SceneState& scene, bool mask,
                                          const VelocityCommand& command = {}) {
  if (mask && task != Task::CarryBox) throw InvalidArgument("build_task_obs: masking applies to carry only");
  std::vector<double> o(task_obs_size(task), 0.0);
  std::size_t i = 0;
  auto put_object = [&] {
    if (mask) {
      i += 9;
      return;
    }
    i = detail::put(o, i, scene.object_pose.position);
    i = detail::put_range(o, i, rot_to_6d(scene.object_pose.rotation).values);
  };
  switch (task) {
    case Task::CarryBox:
      i = detail::put(o, i, scene.object_bbox);
      put_object();
      detail::put(o, i, scene.goal_pos);
      break;
    case Task::SitDown:
    case Task::LieDown:
      put_object();
      break;
    case Task::StandUp:
      put_object();
      detail::put(o, i, scene.goal_pos);
      break;
    case Task::StyleLoco:
      o = {command.vx, command.vy, command.yaw_rate};
      break;
  }
  return o;
}

}  // namespace hsi::task
