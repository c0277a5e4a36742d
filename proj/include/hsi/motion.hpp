#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hsi/error.hpp"
#include "hsi/se3.hpp"
#include "hsi/task/types.hpp"

/// Reference motion clips and the on-disk dataset container.
///
/// Dataset file (JSON, "format": "hsi-motion", "version": 1):
///
///   { "format": "hsi-motion", "version": 1,
///     "clips": [ { "id": str, "subset": str, "fps": num,
///                  "frames": [ { "base": {"position": [x,y,z], "rotation": [r00..r22 row-major]},
///                                "joint_pos": [29], "joint_vel": [29],
///                                "ee_pos": [[x,y,z] x5 (l_hand, r_hand, l_foot, r_foot, head), base frame],
///                                "object": null | {"position": [...], "rotation": [...]} } ] } ] }
///
/// Doubles are written with round-trip precision, so read(write(d)) == d.
namespace hsi::motion {

inline constexpr int kDatasetVersion = 1;
inline constexpr std::string_view kDatasetFormat = "hsi-motion";

enum class Subset { Loco, PickUp, CarryWith, PutDown, Sit, Lie, GetUp, StyleForward, StyleBackward, StyleSide };

constexpr std::string_view to_string(Subset s) {
  switch (s) {
    case Subset::Loco: return "Loco";
    case Subset::PickUp: return "pickUp";
    case Subset::CarryWith: return "carryWith";
    case Subset::PutDown: return "putDown";
    case Subset::Sit: return "Sit";
    case Subset::Lie: return "Lie";
    case Subset::GetUp: return "GetUp";
    case Subset::StyleForward: return "StyleForward";
    case Subset::StyleBackward: return "StyleBackward";
    case Subset::StyleSide: return "StyleSide";
  }
  return "?";
}

inline Subset parse_subset(std::string_view s) {
  for (auto v : {Subset::Loco, Subset::PickUp, Subset::CarryWith, Subset::PutDown, Subset::Sit, Subset::Lie,
                 Subset::GetUp, Subset::StyleForward, Subset::StyleBackward, Subset::StyleSide}) {
    if (to_string(v) == s) return v;
  }
  throw FormatError("unknown motion subset: " + std::string(s));
}

struct Frame {
  /// T_world_base.
  Pose base;
  task::JointVector joint_pos{};
  task::JointVector joint_vel{};
  /// Base frame, ordered as task::EndEffector.
  std::array<Vec3, task::kNumEndEffectors> ee_pos{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                                                  Vec3::Zero()};
  /// T_world_object, when annotated.
  std::optional<Pose> object;

  bool operator==(const Frame&) const = default;
};

struct MotionClip {
  std::string id;
  Subset subset = Subset::Loco;
  double fps = 30.0;
  std::vector<Frame> frames;

  std::size_t size() const { return frames.size(); }
  bool has_object() const {
    return !frames.empty() && std::all_of(frames.begin(), frames.end(), [](const Frame& f) { return f.object.has_value(); });
  }

  void validate() const {
    if (frames.empty()) throw InvalidArgument("clip '" + id + "': no frames");
    if (!(fps > 0)) throw InvalidArgument("clip '" + id + "': fps must be > 0");
  }

  bool operator==(const MotionClip&) const = default;
};

struct MotionDataset {
  std::vector<MotionClip> clips;

  bool operator==(const MotionDataset&) const = default;
};

// ----------------------------------------------------------------------------
// JSON encoding
// ----------------------------------------------------------------------------

using nlohmann::json;

inline json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline json pose_to_json(const Pose& p) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(p.rotation(r, c));
  return {{"position", vec_to_json(p.position)}, {"rotation", rot}};
}

inline Pose pose_from_json(const json& j) {
  Pose p;
  p.position = vec_from_json(j.at("position"));
  const json& rot = j.at("rotation");
  if (!rot.is_array() || rot.size() != 9) throw FormatError("rotation must have 9 entries");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) p.rotation(r, c) = rot[static_cast<std::size_t>(3 * r + c)].get<double>();
  return p;
}

template <std::size_t N>
std::array<double, N> array_from_json(const json& j, std::string_view what) {
  if (!j.is_array() || j.size() != N) {
    throw FormatError(std::string(what) + ": expected " + std::to_string(N) + " values");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = j[i].get<double>();
  return out;
}

inline json frame_to_json(const Frame& f) {
  json ee = json::array();
  for (const Vec3& p : f.ee_pos) ee.push_back(vec_to_json(p));
  return {{"base", pose_to_json(f.base)},
          {"joint_pos", f.joint_pos},
          {"joint_vel", f.joint_vel},
          {"ee_pos", ee},
          {"object", f.object ? pose_to_json(*f.object) : json(nullptr)}};
}

inline Frame frame_from_json(const json& j) {
  Frame f;
  f.base = pose_from_json(j.at("base"));
  f.joint_pos = array_from_json<task::kNumJoints>(j.at("joint_pos"), "joint_pos");
  f.joint_vel = array_from_json<task::kNumJoints>(j.at("joint_vel"), "joint_vel");
  const json& ee = j.at("ee_pos");
  if (!ee.is_array() || ee.size() != task::kNumEndEffectors) throw FormatError("ee_pos: expected 5 positions");
  for (std::size_t i = 0; i < task::kNumEndEffectors; ++i) f.ee_pos[i] = vec_from_json(ee[i]);
  if (j.contains("object") && !j.at("object").is_null()) f.object = pose_from_json(j.at("object"));
  return f;
}

inline json clip_to_json(const MotionClip& c) {
  json frames = json::array();
  for (const Frame& f : c.frames) frames.push_back(frame_to_json(f));
  return {{"id", c.id}, {"subset", std::string(to_string(c.subset))}, {"fps", c.fps}, {"frames", frames}};
}

inline MotionClip clip_from_json(const json& j) {
  MotionClip c;
  c.id = j.at("id").get<std::string>();
  c.subset = parse_subset(j.at("subset").get<std::string>());
  c.fps = j.at("fps").get<double>();
  for (const json& f : j.at("frames")) c.frames.push_back(frame_from_json(f));
  c.validate();
  return c;
}

inline json dataset_to_json(const MotionDataset& d) {
  json clips = json::array();
  for (const auto& c : d.clips) clips.push_back(clip_to_json(c));
  return {{"format", kDatasetFormat}, {"version", kDatasetVersion}, {"clips", clips}};
}

inline MotionDataset dataset_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kDatasetFormat) throw FormatError("not an hsi-motion file");
    if (j.at("version").get<int>() != kDatasetVersion) throw FormatError("unsupported dataset version");
    MotionDataset d;
    for (const json& c : j.at("clips")) d.clips.push_back(clip_from_json(c));
    return d;
  } catch (const json::exception& e) {
    throw FormatError(std::string("dataset: ") + e.what());
  }
}

inline MotionDataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dataset: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("dataset " + path + ": " + e.what());
  }
  return dataset_from_json(j);
}

inline void write_dataset(const std::string& path, const MotionDataset& d) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write dataset: " + path);
  out << dataset_to_json(d).dump(1) << '\n';
}

}  // namespace hsi::motion
