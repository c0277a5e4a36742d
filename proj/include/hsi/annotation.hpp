#pragma once

#include <Eigen/SVD>

#include <array>
#include <cstddef>
#include <fstream>
#include <string>

#include "json.hpp"

#include "hsi/error.hpp"
#include "hsi/motion.hpp"
#include "hsi/se3.hpp"

/// Post-hoc object annotation of retargeted motion clips.
namespace hsi::annotation {

using motion::MotionClip;

inline constexpr int kDefaultSmoothingWindow = 5;

struct ContactAnnotation {
  std::size_t pickup_frame = 0;
  std::size_t place_frame = 0;
  /// Filled by annotate_object.
  Pose pickup_pose;
  Pose place_pose;

  void validate(std::size_t clip_length) const {
    if (!(pickup_frame < place_frame && place_frame < clip_length)) {
      throw InvalidArgument("annotation: require 0 <= pickup < place < clip length");
    }
  }
};

namespace detail {

/// Mean of values[lo..hi] computed as x_lo + mean(x_i - x_lo), which is exact
/// for constant runs.
template <typename Get>
double window_mean(std::size_t lo, std::size_t hi, Get get) {
  const double base = get(lo);
  double acc = 0.0;
  for (std::size_t i = lo + 1; i <= hi; ++i) acc += get(i) - base;
  return base + acc / static_cast<double>(hi - lo + 1);
}

/// Chordal mean of rotations, projected back onto SO(3).
inline Mat3 rotation_mean(const MotionClip& clip, std::size_t lo, std::size_t hi) {
  const Mat3& first = clip.frames[lo].base.rotation;
  bool all_equal = true;
  Mat3 sum = Mat3::Zero();
  for (std::size_t i = lo; i <= hi; ++i) {
    sum += clip.frames[i].base.rotation;
    all_equal = all_equal && clip.frames[i].base.rotation == first;
  }
  if (all_equal) return first;
  Eigen::JacobiSVD<Mat3> svd(sum, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

}  // namespace detail

/// Centered moving average over joint positions/velocities, base position and
/// orientation, and end-effector positions. Near the clip ends the window
/// shrinks symmetrically so it stays centered. Object poses are not touched.
inline MotionClip smooth_motion(const MotionClip& clip, int window = kDefaultSmoothingWindow) {
  clip.validate();
  if (window < 1 || window % 2 == 0) throw InvalidArgument("smooth_motion: window must be odd and >= 1");
  if (static_cast<std::size_t>(window) > clip.size()) throw InvalidArgument("smooth_motion: window exceeds clip length");
  if (window == 1) return clip;

  const std::size_t n = clip.size();
  const std::size_t half = static_cast<std::size_t>(window / 2);
  MotionClip out = clip;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t h = std::min({half, t, n - 1 - t});
    const std::size_t lo = t - h;
    const std::size_t hi = t + h;
    auto& f = out.frames[t];
    for (std::size_t j = 0; j < task::kNumJoints; ++j) {
      f.joint_pos[j] = detail::window_mean(lo, hi, [&](std::size_t i) { return clip.frames[i].joint_pos[j]; });
      f.joint_vel[j] = detail::window_mean(lo, hi, [&](std::size_t i) { return clip.frames[i].joint_vel[j]; });
    }
    for (int k = 0; k < 3; ++k) {
      f.base.position[k] = detail::window_mean(lo, hi, [&](std::size_t i) { return clip.frames[i].base.position[k]; });
      for (std::size_t e = 0; e < task::kNumEndEffectors; ++e) {
        f.ee_pos[e][k] = detail::window_mean(lo, hi, [&](std::size_t i) { return clip.frames[i].ee_pos[e][k]; });
      }
    }
    f.base.rotation = detail::rotation_mean(clip, lo, hi);
  }
  return out;
}

/// Object pose implied by the hands at one frame: position at the hand
/// midpoint, orientation the base yaw (the object stays upright).
inline Pose held_object_pose(const motion::Frame& f) {
  const Vec3 mid = 0.5 * (f.ee_pos[static_cast<std::size_t>(task::EndEffector::LeftHand)] +
                          f.ee_pos[static_cast<std::size_t>(task::EndEffector::RightHand)]);
  return {f.base.transform_point(mid), rot_z(yaw_of(f.base.rotation))};
}

struct AnnotatedClip {
  MotionClip clip;
  ContactAnnotation annotation;
};

/// Synthesizes the object trajectory: hand-held between the pickup and place
/// frames, fixed at the respective contact pose before and after.
inline AnnotatedClip annotate_object(const MotionClip& clip, ContactAnnotation ann) {
  clip.validate();
  ann.validate(clip.size());
  AnnotatedClip out{clip, ann};
  auto& frames = out.clip.frames;
  for (std::size_t t = ann.pickup_frame; t <= ann.place_frame; ++t) frames[t].object = held_object_pose(frames[t]);
  const Pose pickup = *frames[ann.pickup_frame].object;
  const Pose place = *frames[ann.place_frame].object;
  for (std::size_t t = 0; t < ann.pickup_frame; ++t) frames[t].object = pickup;
  for (std::size_t t = ann.place_frame + 1; t < frames.size(); ++t) frames[t].object = place;
  out.annotation.pickup_pose = pickup;
  out.annotation.place_pose = place;
  return out;
}

/// Largest object position jump across the two contact frames.
inline double contact_discontinuity(const MotionClip& clip, const ContactAnnotation& ann) {
  ann.validate(clip.size());
  auto pos = [&](std::size_t t) {
    if (!clip.frames[t].object) throw InvalidArgument("contact_discontinuity: clip is not annotated");
    return clip.frames[t].object->position;
  };
  double jump = 0.0;
  if (ann.pickup_frame > 0) jump = std::max(jump, (pos(ann.pickup_frame - 1) - pos(ann.pickup_frame)).norm());
  if (ann.place_frame + 1 < clip.size()) jump = std::max(jump, (pos(ann.place_frame + 1) - pos(ann.place_frame)).norm());
  return jump;
}

/// Splits into pickUp [0, pickup], carryWith [pickup, place], putDown
/// [place, end]. Boundary frames appear in both neighbours.
inline std::array<MotionClip, 3> split_subsets(const MotionClip& clip, const ContactAnnotation& ann) {
  ann.validate(clip.size());
  auto slice = [&](std::size_t lo, std::size_t hi, motion::Subset subset) {
    MotionClip c;
    c.id = clip.id + "/" + std::string(motion::to_string(subset));
    c.subset = subset;
    c.fps = clip.fps;
    c.frames.assign(clip.frames.begin() + static_cast<std::ptrdiff_t>(lo),
                    clip.frames.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    return c;
  };
  return {slice(0, ann.pickup_frame, motion::Subset::PickUp),
          slice(ann.pickup_frame, ann.place_frame, motion::Subset::CarryWith),
          slice(ann.place_frame, clip.size() - 1, motion::Subset::PutDown)};
}

// ----------------------------------------------------------------------------
// Sidecar record: {"format": "hsi-annotation", "version": 1, "clip_id", "pickup_frame", "place_frame"}
// ----------------------------------------------------------------------------

inline nlohmann::json sidecar_to_json(const std::string& clip_id, const ContactAnnotation& ann) {
  return {{"format", "hsi-annotation"},
          {"version", 1},
          {"clip_id", clip_id},
          {"pickup_frame", ann.pickup_frame},
          {"place_frame", ann.place_frame}};
}

inline std::pair<std::string, ContactAnnotation> sidecar_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "hsi-annotation" || j.at("version").get<int>() != 1) {
      throw FormatError("not an hsi-annotation v1 record");
    }
    ContactAnnotation ann;
    ann.pickup_frame = j.at("pickup_frame").get<std::size_t>();
    ann.place_frame = j.at("place_frame").get<std::size_t>();
    return {j.at("clip_id").get<std::string>(), ann};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("annotation sidecar: ") + e.what());
  }
}

}  // namespace hsi::annotation
