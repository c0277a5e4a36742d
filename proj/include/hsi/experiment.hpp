#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "hsi/error.hpp"
#include "hsi/localization.hpp"
#include "hsi/random.hpp"
#include "hsi/se3.hpp"
#include "hsi/sensor_sim.hpp"

/// Simulated localization trials: scenario config, per-step records, and the
/// summary statistics reported by `localize-sim`.
namespace hsi::experiment {

using nlohmann::json;

inline constexpr int kConfigVersion = 1;

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double sample(Rng& rng) const { return lo == hi ? lo : rng.uniform(lo, hi); }
};

/// Per-trial scene sampling. The object is placed at `object_distance` from
/// the start along `object_bearing_deg`, its tagged face turned back toward
/// the start up to `object_yaw_jitter_deg`.
struct ScenarioRanges {
  Range object_distance{4.0, 6.0};
  Range object_bearing_deg{-30.0, 30.0};
  Range object_height{0.2, 0.6};
  Range object_yaw_jitter_deg{-20.0, 20.0};
  /// Carry goal, relative to the object.
  Range goal_distance{1.5, 3.0};
  Range goal_bearing_deg{-180.0, 180.0};
};

inline sim::TagModel calibrated_tags() {
  sim::TagModel t;
  t.position_noise_sigma = 0.03;
  t.rotation_noise_sigma_deg = 2.0;
  t.dropout_prob = 0.9;
  return t;
}

struct ScenarioConfig {
  int trials = 17;
  double dt = sim::kDefaultDt;
  std::vector<sim::TrajectoryKind> trajectories{sim::TrajectoryKind::Approach, sim::TrajectoryKind::ApproachTurnSit,
                                                sim::TrajectoryKind::ApproachCarry};
  sim::CameraModel camera;
  sim::OdometryModel odometry;
  /// Calibrated: the high per-frame dropout stands in for unreliable
  /// detection of a small tag near the edge of the working range.
  sim::TagModel tags = calibrated_tags();
  ScenarioRanges scenario;
  double epsilon = 0.6;
  /// Horizontal error of the manually specified initial object position (m).
  double coarse_offset = 0.3;
  /// Draw the per-trial facing-limit offset.
  bool facing_jitter = true;

  void validate() const {
    if (trials < 1) throw InvalidArgument("config: trials must be >= 1");
    if (!(dt > 0)) throw InvalidArgument("config: dt must be > 0");
    if (trajectories.empty()) throw InvalidArgument("config: trajectories must be nonempty");
    if (!(coarse_offset >= 0)) throw InvalidArgument("config: coarse_offset must be >= 0");
    if (!(epsilon > 0)) throw InvalidArgument("config: epsilon must be > 0");
    camera.validate();
    odometry.validate();
    tags.validate();
    for (const Range* r : {&scenario.object_distance, &scenario.object_bearing_deg, &scenario.object_height,
                           &scenario.object_yaw_jitter_deg, &scenario.goal_distance, &scenario.goal_bearing_deg}) {
      if (!(r->lo <= r->hi)) throw InvalidArgument("config: range with lo > hi");
    }
  }

  /// Noiseless sensors and an exact initial prior.
  static ScenarioConfig zero_noise() {
    ScenarioConfig c;
    c.odometry.drift_rate = 0;
    c.odometry.heading_drift_rate = 0;
    c.odometry.per_step_noise_sigma = 0;
    c.tags.position_noise_sigma = 0;
    c.tags.rotation_noise_sigma_deg = 0;
    c.tags.dropout_prob = 0;
    c.coarse_offset = 0;
    return c;
  }
};

// ----------------------------------------------------------------------------
// Config JSON (version 1). Unknown keys are rejected; absent keys keep their
// defaults.
// ----------------------------------------------------------------------------

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw FormatError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline void read_vec3(const json& j, const char* key, Vec3& out) {
  if (!j.contains(key)) return;
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 3) throw FormatError(std::string(key) + ": expected 3 values");
  out = Vec3(v[0], v[1], v[2]);
}

inline void read_range(const json& j, const char* key, Range& out) {
  if (!j.contains(key)) return;
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 2) throw FormatError(std::string(key) + ": expected [lo, hi]");
  out = {v[0], v[1]};
}

}  // namespace detail

inline ScenarioConfig config_from_json(const json& j) {
  using detail::check_keys;
  using detail::read;
  ScenarioConfig c;
  try {
    check_keys(j, {"version", "trials", "dt", "trajectories", "camera", "odometry", "tags", "scenario",
                   "localization", "facing_jitter"},
               "config");
    if (j.at("version").get<int>() != kConfigVersion) throw FormatError("config: unsupported version");
    read(j, "trials", c.trials);
    read(j, "dt", c.dt);
    read(j, "facing_jitter", c.facing_jitter);
    if (j.contains("trajectories")) {
      c.trajectories.clear();
      for (const auto& k : j.at("trajectories")) c.trajectories.push_back(sim::parse_trajectory_kind(k.get<std::string>()));
    }
    if (j.contains("camera")) {
      const json& cj = j.at("camera");
      check_keys(cj, {"h_fov_deg", "v_fov_deg", "mount_offset", "mount_pitch_deg", "max_range", "facing_limit_deg",
                      "facing_jitter_range_deg"},
                 "camera");
      read(cj, "h_fov_deg", c.camera.h_fov_deg);
      read(cj, "v_fov_deg", c.camera.v_fov_deg);
      detail::read_vec3(cj, "mount_offset", c.camera.mount_offset);
      read(cj, "mount_pitch_deg", c.camera.mount_pitch_deg);
      read(cj, "max_range", c.camera.max_range);
      read(cj, "facing_limit_deg", c.camera.facing_limit_deg);
      read(cj, "facing_jitter_range_deg", c.camera.facing_jitter_range_deg);
    }
    if (j.contains("odometry")) {
      const json& oj = j.at("odometry");
      check_keys(oj, {"drift_rate", "heading_drift_rate", "per_step_noise_sigma"}, "odometry");
      read(oj, "drift_rate", c.odometry.drift_rate);
      read(oj, "heading_drift_rate", c.odometry.heading_drift_rate);
      read(oj, "per_step_noise_sigma", c.odometry.per_step_noise_sigma);
    }
    if (j.contains("tags")) {
      const json& tj = j.at("tags");
      check_keys(tj, {"position_noise_sigma", "rotation_noise_sigma_deg", "dropout_prob", "face_offset", "tag_size"},
                 "tags");
      read(tj, "position_noise_sigma", c.tags.position_noise_sigma);
      read(tj, "rotation_noise_sigma_deg", c.tags.rotation_noise_sigma_deg);
      read(tj, "dropout_prob", c.tags.dropout_prob);
      read(tj, "face_offset", c.tags.face_offset);
      read(tj, "tag_size", c.tags.tag_size);
    }
    if (j.contains("scenario")) {
      const json& sj = j.at("scenario");
      check_keys(sj, {"object_distance", "object_bearing_deg", "object_height", "object_yaw_jitter_deg",
                      "goal_distance", "goal_bearing_deg"},
                 "scenario");
      detail::read_range(sj, "object_distance", c.scenario.object_distance);
      detail::read_range(sj, "object_bearing_deg", c.scenario.object_bearing_deg);
      detail::read_range(sj, "object_height", c.scenario.object_height);
      detail::read_range(sj, "object_yaw_jitter_deg", c.scenario.object_yaw_jitter_deg);
      detail::read_range(sj, "goal_distance", c.scenario.goal_distance);
      detail::read_range(sj, "goal_bearing_deg", c.scenario.goal_bearing_deg);
    }
    if (j.contains("localization")) {
      const json& lj = j.at("localization");
      check_keys(lj, {"epsilon", "coarse_offset"}, "localization");
      read(lj, "epsilon", c.epsilon);
      read(lj, "coarse_offset", c.coarse_offset);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline json config_to_json(const ScenarioConfig& c) {
  auto v3 = [](const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); };
  auto rg = [](const Range& r) { return json::array({r.lo, r.hi}); };
  json kinds = json::array();
  for (auto k : c.trajectories) kinds.push_back(std::string(sim::to_string(k)));
  return {
      {"version", kConfigVersion},
      {"trials", c.trials},
      {"dt", c.dt},
      {"trajectories", kinds},
      {"camera",
       {{"h_fov_deg", c.camera.h_fov_deg},
        {"v_fov_deg", c.camera.v_fov_deg},
        {"mount_offset", v3(c.camera.mount_offset)},
        {"mount_pitch_deg", c.camera.mount_pitch_deg},
        {"max_range", c.camera.max_range},
        {"facing_limit_deg", c.camera.facing_limit_deg},
        {"facing_jitter_range_deg", c.camera.facing_jitter_range_deg}}},
      {"odometry",
       {{"drift_rate", c.odometry.drift_rate},
        {"heading_drift_rate", c.odometry.heading_drift_rate},
        {"per_step_noise_sigma", c.odometry.per_step_noise_sigma}}},
      {"tags",
       {{"position_noise_sigma", c.tags.position_noise_sigma},
        {"rotation_noise_sigma_deg", c.tags.rotation_noise_sigma_deg},
        {"dropout_prob", c.tags.dropout_prob},
        {"face_offset", c.tags.face_offset},
        {"tag_size", c.tags.tag_size}}},
      {"scenario",
       {{"object_distance", rg(c.scenario.object_distance)},
        {"object_bearing_deg", rg(c.scenario.object_bearing_deg)},
        {"object_height", rg(c.scenario.object_height)},
        {"object_yaw_jitter_deg", rg(c.scenario.object_yaw_jitter_deg)},
        {"goal_distance", rg(c.scenario.goal_distance)},
        {"goal_bearing_deg", rg(c.scenario.goal_bearing_deg)}}},
      {"localization", {{"epsilon", c.epsilon}, {"coarse_offset", c.coarse_offset}}},
      {"facing_jitter", c.facing_jitter},
  };
}

inline ScenarioConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

// ----------------------------------------------------------------------------
// Trials
// ----------------------------------------------------------------------------

struct Row {
  std::size_t step = 0;
  double time = 0.0;
  /// Object in the current base frame.
  Pose gt;
  Pose est;
  localization::Mode mode = localization::Mode::Coarse;
  bool masked = false;
  /// Camera to tag center (m).
  double distance = 0.0;
  /// Position error (m); NaN when masked.
  double error = 0.0;
};

struct TrialRecord {
  int trial = 0;
  sim::TrajectoryKind kind = sim::TrajectoryKind::Approach;
  std::vector<Row> rows;
};

struct TrialSummary {
  int trial = 0;
  sim::TrajectoryKind kind = sim::TrajectoryKind::Approach;
  double coarse_mean = std::numeric_limits<double>::quiet_NaN();
  double fine_mean = std::numeric_limits<double>::quiet_NaN();
  /// Distance at the first Fine step; NaN if the tag was never detected.
  double transition_distance = std::numeric_limits<double>::quiet_NaN();
  bool localized = false;
  double max_error = 0.0;
};

struct Summary {
  std::vector<TrialSummary> trials;
  /// Means pooled over all rows of the stage, across trials.
  double coarse_mean = std::numeric_limits<double>::quiet_NaN();
  double fine_mean = std::numeric_limits<double>::quiet_NaN();
  double transition_mean = std::numeric_limits<double>::quiet_NaN();
  double transition_min = std::numeric_limits<double>::quiet_NaN();
  double transition_max = std::numeric_limits<double>::quiet_NaN();
  double max_error = 0.0;
  std::size_t rows = 0;
};

inline bool is_fine_stage(const Row& r) {
  return !r.masked && (r.mode == localization::Mode::Fine || r.mode == localization::Mode::Propagating);
}

/// Samples the scene of trial `index` and builds its trajectory and sensors.
inline sim::SensorScene make_trial_scene(const ScenarioConfig& cfg, std::uint64_t seed, int index,
                                         sim::TrajectoryKind kind) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(index)));
  Rng geo = rng.substream("scene");
  const auto& sr = cfg.scenario;
  const double dist = sr.object_distance.sample(geo);
  const double bearing = deg_to_rad(sr.object_bearing_deg.sample(geo));
  const double height = sr.object_height.sample(geo);
  const double yaw_jitter = deg_to_rad(sr.object_yaw_jitter_deg.sample(geo));
  const double goal_dist = sr.goal_distance.sample(geo);
  const double goal_bearing = deg_to_rad(sr.goal_bearing_deg.sample(geo));

  sim::TrajectoryParams p;
  p.dt = cfg.dt;
  p.object_position = Vec3(dist * std::cos(bearing), dist * std::sin(bearing), height);
  p.object_yaw = wrap_angle(bearing + kPi + yaw_jitter);
  p.goal_position = p.object_position + Vec3(goal_dist * std::cos(goal_bearing), goal_dist * std::sin(goal_bearing), 0);

  sim::SensorScene scene = sim::scripted_trajectory(kind, p);
  scene.camera = cfg.camera;
  scene.odom = cfg.odometry;
  scene.odom.seed = derive_seed(rng.seed(), hash_name("odometry"));
  scene.tags = cfg.tags;
  scene.tags.seed = derive_seed(rng.seed(), hash_name("tags"));
  scene.dt = cfg.dt;
  if (cfg.facing_jitter && cfg.camera.facing_jitter_range_deg > 0) {
    Rng jit = rng.substream("facing");
    scene.facing_jitter_deg = jit.uniform(-cfg.camera.facing_jitter_range_deg, cfg.camera.facing_jitter_range_deg);
  }
  scene.validate();
  return scene;
}

/// Coarse prior: true initial object position in the start base frame, moved
/// horizontally by `coarse_offset` in a random direction.
inline Vec3 coarse_prior(const ScenarioConfig& cfg, std::uint64_t seed, int index, const sim::SensorScene& scene) {
  Rng rng = Rng(derive_seed(seed, static_cast<std::uint64_t>(index))).substream("prior");
  const Vec3 truth = compose(inverse(scene.robot_gt.front()), scene.object_gt.front()).position;
  if (cfg.coarse_offset == 0) return truth;
  const double a = rng.uniform(-kPi, kPi);
  return truth + cfg.coarse_offset * Vec3(std::cos(a), std::sin(a), 0.0);
}

inline TrialRecord run_trial(const ScenarioConfig& cfg, std::uint64_t seed, int index) {
  const sim::TrajectoryKind kind = cfg.trajectories[static_cast<std::size_t>(index) % cfg.trajectories.size()];
  const sim::SensorScene scene = make_trial_scene(cfg, seed, index, kind);
  const std::vector<Pose> odom = sim::simulate_odometry(scene);

  localization::Config lc;
  lc.epsilon = cfg.epsilon;
  lc.object_class = kind == sim::TrajectoryKind::ApproachCarry ? localization::ObjectClass::Dynamic
                                                              : localization::ObjectClass::Static;
  localization::Localizer loc(lc, coarse_prior(cfg, seed, index, scene));
  const Pose fk = scene.camera.mount();

  TrialRecord rec{index, kind, {}};
  rec.rows.reserve(scene.size());
  for (std::size_t t = 0; t < scene.size(); ++t) {
    const Pose cam = sim::camera_pose(scene.robot_gt[t], scene.camera);
    const auto vis = sim::check_visibility(cam, scene.object_gt[t], scene.camera, scene.facing_jitter_deg, scene.tags);
    const auto det = sim::simulate_detection(scene, t, vis.visible());
    const auto est = loc.step(odom[t], det, fk, vis.visible());

    Row row;
    row.step = t;
    row.time = static_cast<double>(t) * scene.dt;
    row.gt = compose(inverse(scene.robot_gt[t]), scene.object_gt[t]);
    row.est = est.pose();
    row.mode = est.mode;
    row.masked = est.masked;
    row.distance = vis.distance;
    row.error = est.masked ? std::numeric_limits<double>::quiet_NaN() : (row.gt.position - row.est.position).norm();
    rec.rows.push_back(row);
  }
  return rec;
}

/// Runs all trials, in parallel when `threads` > 1. Results are in trial order.
inline std::vector<TrialRecord> run_localization(const ScenarioConfig& cfg, std::uint64_t seed,
                                                 unsigned threads = std::thread::hardware_concurrency()) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.trials);
  std::vector<TrialRecord> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = run_trial(cfg, seed, static_cast<int>(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned count = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(n));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < count; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

inline Summary summarize(const std::vector<TrialRecord>& records) {
  Summary s;
  double coarse_sum = 0, fine_sum = 0, trans_sum = 0;
  std::size_t coarse_n = 0, fine_n = 0, trans_n = 0;
  for (const auto& rec : records) {
    TrialSummary ts;
    ts.trial = rec.trial;
    ts.kind = rec.kind;
    double c_sum = 0, f_sum = 0;
    std::size_t c_n = 0, f_n = 0;
    for (const auto& r : rec.rows) {
      if (r.masked) continue;
      ts.max_error = std::max(ts.max_error, r.error);
      if (r.mode == localization::Mode::Coarse) {
        c_sum += r.error;
        ++c_n;
      } else if (is_fine_stage(r)) {
        f_sum += r.error;
        ++f_n;
      }
      if (!ts.localized && r.mode == localization::Mode::Fine) {
        ts.localized = true;
        ts.transition_distance = r.distance;
      }
    }
    if (c_n) ts.coarse_mean = c_sum / static_cast<double>(c_n);
    if (f_n) ts.fine_mean = f_sum / static_cast<double>(f_n);
    coarse_sum += c_sum;
    coarse_n += c_n;
    fine_sum += f_sum;
    fine_n += f_n;
    if (ts.localized) {
      trans_sum += ts.transition_distance;
      ++trans_n;
      s.transition_min = trans_n == 1 ? ts.transition_distance : std::min(s.transition_min, ts.transition_distance);
      s.transition_max = trans_n == 1 ? ts.transition_distance : std::max(s.transition_max, ts.transition_distance);
    }
    s.max_error = std::max(s.max_error, ts.max_error);
    s.rows += rec.rows.size();
    s.trials.push_back(ts);
  }
  if (coarse_n) s.coarse_mean = coarse_sum / static_cast<double>(coarse_n);
  if (fine_n) s.fine_mean = fine_sum / static_cast<double>(fine_n);
  if (trans_n) s.transition_mean = trans_sum / static_cast<double>(trans_n);
  return s;
}

// ----------------------------------------------------------------------------
// Output
// ----------------------------------------------------------------------------

inline constexpr const char* kRecordsHeader =
    "trial,kind,step,time,gt_x,gt_y,gt_z,est_x,est_y,est_z,mode,masked,distance,error";

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << kRecordsHeader << '\n';
  for (const auto& rec : records) {
    for (const auto& r : rec.rows) {
      out << rec.trial << ',' << sim::to_string(rec.kind) << ',' << r.step << ',' << format_double(r.time);
      for (int k = 0; k < 3; ++k) out << ',' << format_double(r.gt.position[k]);
      for (int k = 0; k < 3; ++k) out << ',' << format_double(r.est.position[k]);
      out << ',' << localization::to_string(r.mode) << ',' << (r.masked ? 1 : 0) << ',' << format_double(r.distance)
          << ',' << format_double(r.error) << '\n';
    }
  }
}

inline json nan_to_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

struct Check {
  std::string name;
  bool pass = false;
};

/// Internal consistency checks; the CLI exits nonzero if any fails.
inline std::vector<Check> internal_checks(const ScenarioConfig& cfg, const Summary& s) {
  bool all_localized = true;
  bool within_range = true;
  for (const auto& t : s.trials) {
    all_localized = all_localized && t.localized;
    if (t.localized) within_range = within_range && t.transition_distance <= cfg.camera.max_range;
  }
  return {{"every_trial_localized", all_localized}, {"transition_within_max_range", within_range}};
}

inline json summary_to_json(const Summary& s, std::uint64_t seed, const std::vector<Check>& checks) {
  json trials = json::array();
  for (const auto& t : s.trials) {
    trials.push_back({{"trial", t.trial},
                      {"kind", std::string(sim::to_string(t.kind))},
                      {"coarse_mean_error", nan_to_null(t.coarse_mean)},
                      {"fine_mean_error", nan_to_null(t.fine_mean)},
                      {"transition_distance", nan_to_null(t.transition_distance)},
                      {"localized", t.localized},
                      {"max_error", t.max_error}});
  }
  json jc = json::object();
  for (const auto& c : checks) jc[c.name] = c.pass;
  return {{"format", "hsi-localize-summary"},
          {"version", 1},
          {"seed", seed},
          {"trial_count", s.trials.size()},
          {"rows", s.rows},
          {"coarse_mean_error", nan_to_null(s.coarse_mean)},
          {"fine_mean_error", nan_to_null(s.fine_mean)},
          {"transition_distance",
           {{"mean", nan_to_null(s.transition_mean)},
            {"min", nan_to_null(s.transition_min)},
            {"max", nan_to_null(s.transition_max)}}},
          {"max_error", s.max_error},
          {"checks", jc},
          {"trials", trials}};
}

}  // namespace hsi::experiment
