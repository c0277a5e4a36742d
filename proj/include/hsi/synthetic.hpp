#pragma once

#include <cmath>
#include <string>

#include "hsi/motion.hpp"
#include "hsi/random.hpp"
#include "hsi/se3.hpp"

/// Procedural stand-in clips for demos and tests. They have plausible shapes
/// (a walk with noisy joints and hands in front of the torso), not real motion.
namespace hsi::synthetic {

struct ClipSpec {
  std::size_t frames = 120;
  double fps = 30.0;
  double speed = 0.6;
  double yaw_rate = 0.2;
  /// Amplitude of the per-frame jitter added to every channel.
  double jitter = 0.01;
};

inline motion::MotionClip walking_clip(const std::string& id, const ClipSpec& spec, Rng& rng) {
  if (spec.frames == 0 || !(spec.fps > 0)) throw InvalidArgument("walking_clip: need frames > 0 and fps > 0");
  motion::MotionClip clip;
  clip.id = id;
  clip.subset = motion::Subset::Loco;
  clip.fps = spec.fps;
  const double dt = 1.0 / spec.fps;
  double yaw = rng.uniform(-kPi, kPi);
  Vec3 pos(rng.uniform(-1, 1), rng.uniform(-1, 1), 0.75);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    motion::Frame f;
    const double phase = 2.0 * kPi * static_cast<double>(t) * dt;
    f.base = {pos + Vec3(0, 0, spec.jitter * rng.normal()), rot_z(yaw) * rot_x(spec.jitter * rng.normal())};
    for (std::size_t j = 0; j < task::kNumJoints; ++j) {
      f.joint_pos[j] = 0.3 * std::sin(phase + 0.2 * static_cast<double>(j)) + spec.jitter * rng.normal();
      f.joint_vel[j] = 0.3 * 2.0 * kPi * std::cos(phase + 0.2 * static_cast<double>(j)) + spec.jitter * rng.normal();
    }
    auto jit = [&] { return Vec3(rng.normal(), rng.normal(), rng.normal()) * spec.jitter; };
    f.ee_pos = {Vec3(0.30, 0.20, 0.05) + jit(), Vec3(0.30, -0.20, 0.05) + jit(), Vec3(0.0, 0.10, -0.72) + jit(),
                Vec3(0.0, -0.10, -0.72) + jit(), Vec3(0.0, 0.0, 0.55) + jit()};
    clip.frames.push_back(f);
    pos += spec.speed * dt * Vec3(std::cos(yaw), std::sin(yaw), 0);
    yaw = wrap_angle(yaw + spec.yaw_rate * dt);
  }
  return clip;
}

}  // namespace hsi::synthetic
