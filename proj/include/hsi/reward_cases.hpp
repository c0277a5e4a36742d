#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hsi/error.hpp"
#include "hsi/se3.hpp"
#include "hsi/task/amp.hpp"
#include "hsi/task/composition.hpp"
#include "hsi/task/rewards.hpp"

/// Regression tables for the reward kernels, as read by `reward-check`.
///
/// File: {"format": "hsi-reward-cases", "version": 1, "cases": [case...]}
/// Case keys (all but name/term/expected optional):
///   name, term, expected, tol (default 1e-9)
///   base: {"position": [x,y,z], "rpy_deg": [roll,pitch,yaw]}     world pose
///   vel_world, vel_base, ang_vel: [x,y,z]
///   head, left_hand, right_hand: [x,y,z]                         base frame
///   object: {"position": [x,y,z], "yaw_deg": y}                   world pose
///   goal: [x,y,z]                                                 world
///   hand_mid: [x,y,z]            world; overrides the value from the hands
///   command: [vx, vy, yaw_rate]
///   lie_branches: "standard" | "swapped"
///   score: discriminator score, for term "style"
/// Terms: loco, carry, pick, put, sit, lie, standup, loco_tar, style_loco, style.
namespace hsi::rewardcheck {

using nlohmann::json;

struct Case {
  std::string name;
  std::string term;
  double expected = 0.0;
  double tol = 1e-9;
  task::RobotState state;
  task::SceneState scene;
  task::VelocityCommand command;
  task::LieBranches lie = task::LieBranches::Standard;
  double score = 0.5;
};

struct Result {
  std::string name;
  std::string term;
  double expected = 0.0;
  double actual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

inline const std::vector<std::string>& known_terms() {
  static const std::vector<std::string> terms{"loco",    "carry",    "pick",       "put",  "sit",
                                              "lie",     "standup",  "loco_tar",   "style_loco", "style"};
  return terms;
}

namespace detail {

inline Vec3 vec3(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw FormatError("expected a 3-vector");
  return {v[0], v[1], v[2]};
}

inline Mat3 rpy_deg(const Vec3& rpy) {
  return rot_z(deg_to_rad(rpy.z())) * rot_y(deg_to_rad(rpy.y())) * rot_x(deg_to_rad(rpy.x()));
}

}  // namespace detail

inline Case case_from_json(const json& j) {
  using detail::vec3;
  Case c;
  c.name = j.at("name").get<std::string>();
  c.term = j.at("term").get<std::string>();
  if (std::find(known_terms().begin(), known_terms().end(), c.term) == known_terms().end()) {
    throw FormatError("case '" + c.name + "': unknown term '" + c.term + "'");
  }
  c.expected = j.at("expected").get<double>();
  if (j.contains("tol")) c.tol = j.at("tol").get<double>();

  auto& s = c.state;
  if (j.contains("base")) {
    const json& b = j.at("base");
    if (b.contains("position")) s.base_pose.position = vec3(b.at("position"));
    if (b.contains("rpy_deg")) s.base_pose.rotation = detail::rpy_deg(vec3(b.at("rpy_deg")));
  }
  s.base_height = s.base_pose.position.z();
  if (j.contains("vel_world")) s.base_lin_vel_world = vec3(j.at("vel_world"));
  if (j.contains("vel_base")) s.base_lin_vel = vec3(j.at("vel_base"));
  if (j.contains("ang_vel")) s.base_ang_vel = vec3(j.at("ang_vel"));
  if (j.contains("head")) s.ee(task::EndEffector::Head) = vec3(j.at("head"));
  if (j.contains("left_hand")) s.ee(task::EndEffector::LeftHand) = vec3(j.at("left_hand"));
  if (j.contains("right_hand")) s.ee(task::EndEffector::RightHand) = vec3(j.at("right_hand"));
  s.validate();

  Pose object;
  if (j.contains("object")) {
    const json& o = j.at("object");
    if (o.contains("position")) object.position = vec3(o.at("position"));
    if (o.contains("yaw_deg")) object.rotation = rot_z(deg_to_rad(o.at("yaw_deg").get<double>()));
  }
  const Vec3 goal = j.contains("goal") ? vec3(j.at("goal")) : Vec3::Zero();
  c.scene = task::make_scene(s, object, goal);
  if (j.contains("hand_mid")) c.scene.hand_mid = vec3(j.at("hand_mid"));

  if (j.contains("command")) {
    const auto v = j.at("command").get<std::vector<double>>();
    if (v.size() != 3) throw FormatError("command: expected [vx, vy, yaw_rate]");
    c.command = {v[0], v[1], v[2]};
  }
  if (j.contains("lie_branches")) {
    const auto b = j.at("lie_branches").get<std::string>();
    if (b == "standard") c.lie = task::LieBranches::Standard;
    else if (b == "swapped") c.lie = task::LieBranches::Swapped;
    else throw FormatError("lie_branches: expected standard or swapped");
  }
  if (j.contains("score")) c.score = j.at("score").get<double>();
  return c;
}

inline std::vector<Case> cases_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "hsi-reward-cases" || j.at("version").get<int>() != 1) {
      throw FormatError("not an hsi-reward-cases v1 file");
    }
    std::vector<Case> out;
    for (const json& c : j.at("cases")) out.push_back(case_from_json(c));
    if (out.empty()) throw FormatError("cases file contains no cases");
    return out;
  } catch (const json::exception& e) {
    throw FormatError(std::string("cases: ") + e.what());
  }
}

inline std::vector<Case> read_cases(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open cases file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("cases " + path + ": " + e.what());
  }
  return cases_from_json(j);
}

inline double evaluate(const Case& c) {
  const auto& s = c.state;
  const auto& sc = c.scene;
  if (c.term == "loco") return task::r_loco(s, sc);
  if (c.term == "carry") return task::r_carry(s, sc);
  if (c.term == "pick") return task::r_pick(s, sc);
  if (c.term == "put") return task::r_put(s, sc);
  if (c.term == "sit") return task::r_sit(s, sc);
  if (c.term == "lie") return task::r_lie(s, sc, c.lie);
  if (c.term == "standup") return task::r_standup(s);
  if (c.term == "loco_tar") return task::r_loco_tar(s, sc);
  if (c.term == "style_loco") return task::r_style_loco(s, c.command);
  if (c.term == "style") return task::style_reward(c.score);
  throw FormatError("unknown term '" + c.term + "'");
}

/// True if `term` contributes to `task`; "style" applies to every task.
inline bool term_in_task(const std::string& term, task::Task t) {
  if (term == "style") return true;
  const auto names = task::task_term_names(t);
  return std::find(names.begin(), names.end(), term) != names.end();
}

/// Evaluates the cases relevant to `task` (all cases when unset).
inline std::vector<Result> run_cases(const std::vector<Case>& cases, std::optional<task::Task> t = std::nullopt) {
  std::vector<Result> out;
  for (const auto& c : cases) {
    if (t && !term_in_task(c.term, *t)) continue;
    const double actual = evaluate(c);
    out.push_back({c.name, c.term, c.expected, actual, c.tol, std::abs(actual - c.expected) <= c.tol});
  }
  return out;
}

}  // namespace hsi::rewardcheck
