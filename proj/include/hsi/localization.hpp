#pragma once

#include <cmath>
#include <optional>
#include <string_view>

#include "hsi/error.hpp"
#include "hsi/se3.hpp"

/// Coarse-to-fine object localization.
///
/// Frames: b0 is the robot base at episode start, bt the base at time t, ct
/// the camera at time t, ot the object. Odometry reports T_b0_bt, detections
/// report T_ct_ot, forward kinematics reports T_bt_ct. Every query returns the
/// object pose in the current base frame, T_bt_ot.
///
/// The state machine is a value type: each update returns a new state.
namespace hsi::localization {

enum class ObjectClass { Static, Dynamic };

enum class Mode { Coarse, Fine, Propagating, Masked };

constexpr std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Coarse: return "coarse";
    case Mode::Fine: return "fine";
    case Mode::Propagating: return "propagating";
    case Mode::Masked: return "masked";
  }
  return "?";
}

constexpr std::string_view to_string(ObjectClass c) {
  return c == ObjectClass::Static ? "static" : "dynamic";
}

struct Config {
  /// Grasp-phase distance threshold (m), horizontal distance in the base frame.
  double epsilon = 0.6;
  ObjectClass object_class = ObjectClass::Static;

  void validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("localization: epsilon must be > 0");
  }
};

struct State {
  Mode mode = Mode::Coarse;
  /// T_b0_o0, manually specified coarse prior.
  Pose anchor_object_in_base0;
  /// Last fused detection T_ct'_ot' with its FK T_bt'_ct' and odometry T_b0_bt'.
  Pose anchor_detection;
  Pose anchor_fk;
  Pose anchor_odometry;
  /// Most recent T_b0_bt.
  Pose latest_odometry;
  /// Latched once a dynamic object comes within epsilon; cleared only by a
  /// fresh init_coarse.
  bool grasp_phase = false;
};

/// Object pose in the current base frame. When masked, position is zero and
/// rotation is identity; consumers must treat those as absent.
struct PoseEstimate {
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  Mode mode = Mode::Coarse;
  bool masked = false;

  Pose pose() const { return {position, rotation}; }
  static PoseEstimate masked_sentinel() { return {Vec3::Zero(), Mat3::Identity(), Mode::Masked, true}; }
};

inline State init_coarse(const Vec3& p0) {
  if (!p0.allFinite()) throw InvalidArgument("init_coarse: non-finite position");
  State s;
  s.anchor_object_in_base0 = to_transform(p0, Mat3::Identity());
  return s;
}

inline State update_odometry(State state, const Pose& base0_to_base) {
  state.latest_odometry = base0_to_base;
  return state;
}

/// Fuses a fiducial detection (T_ct_ot) taken with camera FK `fk_camera`
/// (T_bt_ct). A missing detection keeps the last fused anchors.
inline State update_detection(State state, const std::optional<Pose>& detection, const Pose& fk_camera) {
  if (detection) {
    if (!is_valid(*detection, 1e-6)) throw InvalidArgument("update_detection: invalid detection pose");
    state.mode = Mode::Fine;
    state.anchor_detection = *detection;
    state.anchor_fk = fk_camera;
    state.anchor_odometry = state.latest_odometry;
    return state;
  }
  if (state.mode == Mode::Fine) state.mode = Mode::Propagating;
  return state;
}

/// Relative base motion since the last fused detection, T_bt'_bt.
inline Pose motion_since_anchor(const State& state) {
  return compose(inverse(state.anchor_odometry), state.latest_odometry);
}

inline PoseEstimate query_pose(const State& state, const Config& config) {
  Pose estimate;
  switch (state.mode) {
    case Mode::Masked:
      return PoseEstimate::masked_sentinel();
    case Mode::Coarse:
      estimate = compose(inverse(state.latest_odometry), state.anchor_object_in_base0);
      break;
    case Mode::Fine:
      estimate = compose(state.anchor_fk, state.anchor_detection);
      break;
    case Mode::Propagating: {
      const Pose last_seen = compose(state.anchor_fk, state.anchor_detection);
      // In the grasp phase a dynamic object moves with the base, so its
      // base-frame pose is held rather than compensated for base motion.
      if (config.object_class == ObjectClass::Dynamic && state.grasp_phase) {
        estimate = last_seen;
      } else {
        estimate = compose(inverse(motion_since_anchor(state)), last_seen);
      }
      break;
    }
  }
  const auto [p, r] = from_transform(estimate);
  return {p, r, state.mode, false};
}

/// Horizontal distance used for the grasp-phase threshold.
inline double planar_distance(const PoseEstimate& estimate) {
  return std::hypot(estimate.position.x(), estimate.position.y());
}

/// Grasp-phase bookkeeping for dynamic objects. Entering the phase is latched;
/// once in it, losing the object from view masks the estimate.
inline State update_grasp_phase(State state, const Config& config, const PoseEstimate& estimate, bool in_view) {
  if (config.object_class != ObjectClass::Dynamic) {
    throw InvalidState("update_grasp_phase: object is static");
  }
  if (!state.grasp_phase && !estimate.masked && planar_distance(estimate) <= config.epsilon) {
    state.grasp_phase = true;
  }
  if (!state.grasp_phase) return state;
  if (!in_view) {
    state.mode = Mode::Masked;
  } else if (state.mode == Mode::Masked) {
    // Back in view without a fused detection yet: hold the last anchors until
    // the next detection switches to Fine.
    state.mode = Mode::Propagating;
  }
  return state;
}

/// Convenience driver bundling the per-step update order: odometry, then
/// detection, then (dynamic objects only) grasp-phase bookkeeping.
class Localizer {
 public:
  Localizer(const Config& config, const Vec3& coarse_prior) : config_(config), state_(init_coarse(coarse_prior)) {
    config_.validate();
  }

  PoseEstimate step(const Pose& base0_to_base, const std::optional<Pose>& detection, const Pose& fk_camera,
                    bool in_view) {
    state_ = update_odometry(state_, base0_to_base);
    state_ = update_detection(state_, detection, fk_camera);
    if (config_.object_class == ObjectClass::Dynamic) {
      state_ = update_grasp_phase(state_, config_, query_pose(state_, config_), in_view);
    }
    return query_pose(state_, config_);
  }

  const State& state() const { return state_; }
  const Config& config() const { return config_; }

 private:
  Config config_;
  State state_;
};

}  // namespace hsi::localization
