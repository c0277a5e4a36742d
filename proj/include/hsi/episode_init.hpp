#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hsi/error.hpp"
#include "hsi/motion.hpp"
#include "hsi/random.hpp"
#include "hsi/se3.hpp"
#include "hsi/task/observations.hpp"
#include "hsi/task/types.hpp"

/// Hybrid reference state initialization, scene randomization, and domain
/// randomization. Every sampler takes an explicit Rng.
namespace hsi::init {

using task::Task;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double half_width() const { return 0.5 * (hi - lo); }
  double center() const { return 0.5 * (lo + hi); }
};

/// Named scene parameters in sampling order.
using RangeList = std::vector<std::pair<std::string, Interval>>;
using SceneParams = std::map<std::string, double>;

struct SceneRanges {
  std::map<Task, RangeList> per_task;

  static SceneRanges defaults() {
    SceneRanges r;
    r.per_task[Task::CarryBox] = {
        {"object_x", {-4.0, 4.0}},     {"object_y", {-4.0, 4.0}},   {"goal_x", {-4.0, 4.0}},
        {"goal_y", {-4.0, 4.0}},       {"object_height", {0.0, 0.6}}, {"goal_height", {0.0, 0.6}},
        {"box_width", {0.2, 0.5}},     {"box_height", {0.15, 0.35}}, {"box_density", {10.0, 100.0}},
    };
    r.per_task[Task::SitDown] = {
        {"object_x", {-5.0, 5.0}},       {"object_y", {-5.0, 5.0}},   {"surface_height", {0.2, 0.5}},
        {"chair_length", {0.3, 0.6}},    {"chair_width", {0.3, 0.6}},
    };
    r.per_task[Task::LieDown] = {
        {"object_x", {-5.0, 5.0}},    {"object_y", {-5.0, 5.0}},    {"surface_height", {0.2, 0.5}},
        {"bed_length", {1.2, 3.2}},   {"bed_width", {0.38, 0.63}},
    };
    r.per_task[Task::StandUp] = {
        {"target_x", {-5.0, 5.0}},     {"target_y", {-5.0, 5.0}},   {"chair_height", {0.2, 0.6}},
        {"chair_length", {0.38, 0.63}}, {"chair_width", {0.38, 0.63}},
    };
    r.per_task[Task::StyleLoco] = {};
    return r;
  }

  const RangeList& for_task(Task t) const {
    const auto it = per_task.find(t);
    if (it == per_task.end()) throw InvalidArgument("SceneRanges: no ranges for task");
    return it->second;
  }

  void validate() const {
    for (const auto& [t, list] : per_task)
      for (const auto& [name, iv] : list)
        if (!(iv.lo <= iv.hi)) throw InvalidArgument("SceneRanges: min > max for " + name);
  }
};

/// Uniform draw of every scene parameter of `task`, in declaration order.
inline SceneParams randomize_scene(Task task, const SceneRanges& ranges, Rng& rng) {
  SceneParams out;
  for (const auto& [name, iv] : ranges.for_task(task)) out[name] = rng.uniform(iv.lo, iv.hi);
  return out;
}

// ----------------------------------------------------------------------------
// Domain randomization
// ----------------------------------------------------------------------------

struct DomainRanges {
  // Observation noise, redrawn every step.
  Interval ang_vel_noise{-0.3, 0.3};
  Interval joint_pos_noise{-0.02, 0.02};
  Interval joint_vel_noise{-2.0, 2.0};
  Interval gravity_noise{-0.05, 0.05};
  Interval fk_noise{-0.05, 0.05};
  // Physical properties, drawn once per episode.
  Interval actuator_offset{-0.05, 0.05};
  Interval motor_strength{0.9, 1.1};
  Interval payload_mass{-2.0, 2.0};
  Interval com_displacement{-0.05, 0.05};
  Interval kp_kd_factor{0.85, 1.15};
  Interval box_friction{0.5, 1.2};
  Interval box_restitution{0.0, 0.2};
  Interval platform_friction{0.5, 1.2};
  // Object localization: offsets per episode, noise per step.
  Interval loc_position_offset{-0.05, 0.05};
  Interval loc_position_noise{-0.05, 0.05};
  Interval loc_rotation_offset_deg{-5.0, 5.0};
  Interval loc_rotation_noise_deg{-5.0, 5.0};
  /// Observation lag drawn uniformly from {0, ..., max_delay_steps}.
  int max_delay_steps = 2;
  /// Draw per-step noise from N(center, (half_width / 3)^2) truncated to the
  /// interval instead of uniformly.
  bool gaussian_noise = false;
};

/// One episode's randomization: constant offsets plus the per-step noise
/// intervals they were drawn with.
struct DomainDraw {
  DomainRanges noise;
  task::JointVector actuator_offset{};
  task::JointVector motor_strength{};
  double payload_mass = 0.0;
  Vec3 com_displacement = Vec3::Zero();
  double kp_factor = 1.0;
  double kd_factor = 1.0;
  double box_friction = 1.0;
  double box_restitution = 0.0;
  double platform_friction = 1.0;
  Vec3 loc_position_offset = Vec3::Zero();
  Vec3 loc_rotation_offset_deg = Vec3::Zero();
  int delay_steps = 0;

  /// No offsets, unit factors, zero-width noise.
  static DomainDraw zero() {
    DomainDraw d;
    const Interval none{0.0, 0.0};
    d.noise.ang_vel_noise = d.noise.joint_pos_noise = d.noise.joint_vel_noise = none;
    d.noise.gravity_noise = d.noise.fk_noise = none;
    d.noise.loc_position_noise = d.noise.loc_rotation_noise_deg = none;
    d.motor_strength.fill(1.0);
    return d;
  }
};

inline DomainDraw sample_domain(const DomainRanges& ranges, Rng& rng) {
  DomainDraw d;
  d.noise = ranges;
  auto draw = [&](const Interval& iv) { return rng.uniform(iv.lo, iv.hi); };
  for (double& v : d.actuator_offset) v = draw(ranges.actuator_offset);
  for (double& v : d.motor_strength) v = draw(ranges.motor_strength);
  d.payload_mass = draw(ranges.payload_mass);
  for (int i = 0; i < 3; ++i) d.com_displacement[i] = draw(ranges.com_displacement);
  d.kp_factor = draw(ranges.kp_kd_factor);
  d.kd_factor = draw(ranges.kp_kd_factor);
  d.box_friction = draw(ranges.box_friction);
  d.box_restitution = draw(ranges.box_restitution);
  d.platform_friction = draw(ranges.platform_friction);
  for (int i = 0; i < 3; ++i) d.loc_position_offset[i] = draw(ranges.loc_position_offset);
  for (int i = 0; i < 3; ++i) d.loc_rotation_offset_deg[i] = draw(ranges.loc_rotation_offset_deg);
  d.delay_steps = static_cast<int>(rng.uniform_int(0, ranges.max_delay_steps));
  return d;
}

/// One per-step noise sample from `iv`.
inline double sample_noise(const Interval& iv, bool gaussian, Rng& rng) {
  if (iv.lo == iv.hi) return iv.lo;
  if (!gaussian) return rng.uniform(iv.lo, iv.hi);
  return std::clamp(rng.normal(iv.center(), iv.half_width() / 3.0), iv.lo, iv.hi);
}

/// Adds per-step noise to angular velocity, gravity, joint position/velocity,
/// and end-effector (FK) slots. The previous-action slots are untouched.
inline task::ProprioObs apply_obs_noise(const task::ProprioObs& obs, const DomainDraw& draw, Rng& rng) {
  namespace L = task::layout;
  const auto& n = draw.noise;
  const bool g = n.gaussian_noise;
  task::ProprioObs out = obs;
  for (std::size_t i = 0; i < 3; ++i) out[L::kProprioAngVel + i] += sample_noise(n.ang_vel_noise, g, rng);
  for (std::size_t i = 0; i < 3; ++i) out[L::kProprioGravity + i] += sample_noise(n.gravity_noise, g, rng);
  for (std::size_t i = 0; i < task::kNumJoints; ++i) out[L::kProprioJointPos + i] += sample_noise(n.joint_pos_noise, g, rng);
  for (std::size_t i = 0; i < task::kNumJoints; ++i) out[L::kProprioJointVel + i] += sample_noise(n.joint_vel_noise, g, rng);
  for (std::size_t i = 0; i < 3 * task::kNumEndEffectors; ++i) {
    out[L::kProprioEndEffectors + i] += sample_noise(n.fk_noise, g, rng);
  }
  return out;
}

inline Mat3 small_rotation_deg(const Vec3& xyz_deg) {
  return rot_z(deg_to_rad(xyz_deg.z())) * rot_y(deg_to_rad(xyz_deg.y())) * rot_x(deg_to_rad(xyz_deg.x()));
}

/// Object pose observation with the episode offset and fresh per-step noise:
/// position + offset + noise; rotation * R(offset) * R(noise).
inline Pose apply_localization_noise(const Pose& estimate, const DomainDraw& draw, Rng& rng) {
  const auto& n = draw.noise;
  Vec3 pos_noise, rot_noise;
  for (int i = 0; i < 3; ++i) pos_noise[i] = sample_noise(n.loc_position_noise, n.gaussian_noise, rng);
  for (int i = 0; i < 3; ++i) rot_noise[i] = sample_noise(n.loc_rotation_noise_deg, n.gaussian_noise, rng);
  Pose out;
  out.position = estimate.position + draw.loc_position_offset + pos_noise;
  out.rotation = estimate.rotation;
  if (!draw.loc_rotation_offset_deg.isZero()) out.rotation = out.rotation * small_rotation_deg(draw.loc_rotation_offset_deg);
  if (!rot_noise.isZero()) out.rotation = out.rotation * small_rotation_deg(rot_noise);
  return out;
}

/// Fixed-lag observation buffer. push() returns the value from `delay` steps
/// earlier, or the oldest available value during warm-up.
template <typename T>
class DelayLine {
 public:
  explicit DelayLine(int delay) : delay_(static_cast<std::size_t>(delay)) {
    if (delay < 0) throw InvalidArgument("DelayLine: negative delay");
  }

  T push(T value) {
    buffer_.push_back(std::move(value));
    if (buffer_.size() > delay_ + 1) buffer_.pop_front();
    return buffer_.front();
  }

 private:
  std::size_t delay_;
  std::deque<T> buffer_;
};

// ----------------------------------------------------------------------------
// Hybrid reference state initialization
// ----------------------------------------------------------------------------

struct RsiConfig {
  /// Share of episodes started from the default pose with a fully random
  /// scene. No default value is implied; callers set it.
  double default_pose_fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(default_pose_fraction >= 0 && default_pose_fraction <= 1)) {
      throw InvalidArgument("RsiConfig: default_pose_fraction must be in [0, 1]");
    }
  }
};

enum class InitMode { FromReference, DefaultPose };

constexpr std::string_view to_string(InitMode m) {
  return m == InitMode::FromReference ? "reference" : "default";
}

struct EpisodeInit {
  InitMode mode = InitMode::DefaultPose;
  std::string clip_id;
  std::size_t clip_index = 0;
  double phase = 0.0;
  std::size_t frame_index = 0;
  /// Randomized scene parameters; always within SceneRanges.
  SceneParams scene;
  /// Parameters fixed by the reference clip (object placement before the
  /// sampled phase). Overrides `scene` where present.
  SceneParams reference_context;
  DomainDraw randomization;

  SceneParams effective_scene() const {
    SceneParams s = scene;
    for (const auto& [k, v] : reference_context) s[k] = v;
    return s;
  }
};

/// round(phase * (len - 1)).
inline std::size_t phase_to_frame(double phase, std::size_t clip_length) {
  if (clip_length == 0) throw InvalidArgument("phase_to_frame: empty clip");
  return static_cast<std::size_t>(std::llround(phase * static_cast<double>(clip_length - 1)));
}

/// Scene parameters a clip's annotated object fixes for `task`, expressed
/// relative to the clip's base position at `frame`.
inline SceneParams reference_context(Task task, const motion::MotionClip& clip, std::size_t frame) {
  SceneParams ctx;
  const auto& f = clip.frames.at(frame);
  if (!f.object) return ctx;
  const Vec3 rel = f.object->position - f.base.position;
  switch (task) {
    case Task::CarryBox:
      ctx["object_x"] = rel.x();
      ctx["object_y"] = rel.y();
      ctx["object_height"] = f.object->position.z();
      break;
    case Task::SitDown:
    case Task::LieDown:
      ctx["object_x"] = rel.x();
      ctx["object_y"] = rel.y();
      ctx["surface_height"] = f.object->position.z();
      break;
    case Task::StandUp:
      ctx["chair_height"] = f.object->position.z();
      break;
    case Task::StyleLoco:
      break;
  }
  return ctx;
}

/// Draws one episode start. With probability `default_pose_fraction` the
/// robot starts from the default pose with every scene parameter random;
/// otherwise a clip and phase are drawn uniformly and the clip's annotated
/// object placement is kept while everything after the phase is randomized.
inline EpisodeInit sample_init(const motion::MotionDataset& dataset, Task task, const SceneRanges& ranges,
                               const RsiConfig& cfg, const DomainRanges& domain, Rng& rng) {
  if (dataset.clips.empty()) throw InvalidArgument("sample_init: empty dataset");
  cfg.validate();
  EpisodeInit out;
  const bool default_pose = rng.uniform01() < cfg.default_pose_fraction;
  if (default_pose) {
    out.mode = InitMode::DefaultPose;
  } else {
    out.mode = InitMode::FromReference;
    out.clip_index = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(dataset.clips.size()) - 1));
    const auto& clip = dataset.clips[out.clip_index];
    clip.validate();
    out.clip_id = clip.id;
    out.phase = rng.uniform01();
    out.frame_index = phase_to_frame(out.phase, clip.size());
  }
  out.scene = randomize_scene(task, ranges, rng);
  out.randomization = sample_domain(domain, rng);
  if (!default_pose) out.reference_context = reference_context(task, dataset.clips[out.clip_index], out.frame_index);
  return out;
}

}  // namespace hsi::init
