#pragma once

// Random generators shared by the unit and acceptance tests.

#include <cmath>

#include "hsi/random.hpp"
#include "hsi/se3.hpp"
#include "hsi/task/composition.hpp"
#include "hsi/task/types.hpp"

namespace testing_helpers {

using hsi::Mat3;
using hsi::Pose;
using hsi::Rng;
using hsi::Vec3;

inline Vec3 random_vec(Rng& rng, double lo, double hi) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

/// Uniform rotation from a normalized Gaussian quaternion.
inline Mat3 random_rotation(Rng& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  return q.toRotationMatrix();
}

inline Pose random_pose(Rng& rng, double extent = 10.0) {
  return {random_vec(rng, -extent, extent), random_rotation(rng)};
}

/// Random robot and scene, loosely around plausible magnitudes.
struct RandomWorld {
  hsi::task::RobotState state;
  hsi::task::SceneState scene;
  hsi::task::VelocityCommand command;
};

inline RandomWorld random_world(Rng& rng) {
  using namespace hsi;
  RandomWorld w;
  auto& s = w.state;
  const double roll = rng.uniform(-0.3, 0.3);
  const double pitch = rng.uniform(-0.3, 0.3);
  s.base_pose = {Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0.0, 1.2)),
                 rot_z(rng.uniform(-kPi, kPi)) * rot_y(pitch) * rot_x(roll)};
  s.base_height = s.base_pose.position.z();
  s.base_lin_vel = random_vec(rng, -1.5, 1.5);
  s.base_lin_vel_world = s.base_pose.rotation * s.base_lin_vel;
  s.base_ang_vel = random_vec(rng, -2, 2);
  s.gravity_dir = s.base_pose.rotation.transpose() * Vec3(0, 0, -1);
  for (std::size_t j = 0; j < task::kNumJoints; ++j) {
    s.joint_pos[j] = rng.uniform(-2, 2);
    s.joint_vel[j] = rng.uniform(-10, 10);
    s.joint_acc[j] = rng.uniform(-100, 100);
    s.prev_action[j] = rng.uniform(-1, 1);
    s.torques[j] = rng.uniform(-150, 150);
  }
  s.ee(task::EndEffector::LeftHand) = Vec3(rng.uniform(0, 0.5), rng.uniform(0.1, 0.3), rng.uniform(-0.3, 0.3));
  s.ee(task::EndEffector::RightHand) = Vec3(rng.uniform(0, 0.5), rng.uniform(-0.3, -0.1), rng.uniform(-0.3, 0.3));
  s.ee(task::EndEffector::LeftFoot) = Vec3(rng.uniform(-0.2, 0.2), 0.1, -0.7);
  s.ee(task::EndEffector::RightFoot) = Vec3(rng.uniform(-0.2, 0.2), -0.1, -0.7);
  s.ee(task::EndEffector::Head) = Vec3(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(0.3, 0.6));

  // Mix near and far objects so every reward branch is exercised.
  const double spread = rng.bernoulli(0.5) ? 0.8 : 4.0;
  const Vec3 obj(s.base_pose.position.x() + rng.uniform(-spread, spread),
                 s.base_pose.position.y() + rng.uniform(-spread, spread), rng.uniform(0.0, 1.2));
  const Vec3 goal(s.base_pose.position.x() + rng.uniform(-spread, spread),
                  s.base_pose.position.y() + rng.uniform(-spread, spread), rng.uniform(0.0, 1.0));
  w.scene = task::make_scene(s, pose_from_xyz_yaw(obj, rng.uniform(-kPi, kPi)), goal,
                             Vec3(rng.uniform(0.2, 0.5), rng.uniform(0.2, 0.5), rng.uniform(0.15, 0.35)));
  w.command = {rng.uniform(-1, 1), rng.uniform(-0.5, 0.5), rng.uniform(-1, 1)};
  return w;
}

}  // namespace testing_helpers
