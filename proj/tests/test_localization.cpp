#include <gtest/gtest.h>

#include "hsi/localization.hpp"
#include "oracle.hpp"
#include "scene_check.hpp"

using namespace hsi;
using namespace hsi::localization;

namespace {

Config static_cfg() { return {}; }
Config dynamic_cfg() {
  Config c;
  c.object_class = ObjectClass::Dynamic;
  return c;
}

// Camera looking straight along the base x axis, at the base origin.
const Pose kFk = Pose::identity();

}  // namespace

TEST(Coarse, InitAndImmediateQuery) {
  const State s = init_coarse(Vec3(3, 0, 0));
  EXPECT_EQ(s.mode, Mode::Coarse);
  EXPECT_EQ(s.anchor_object_in_base0, translate(3, 0, 0));
  const auto e = query_pose(s, static_cfg());
  EXPECT_EQ(e.position, Vec3(3, 0, 0));
  EXPECT_EQ(e.rotation, Mat3::Identity());
  EXPECT_FALSE(e.masked);
}

TEST(Coarse, PriorIsStoredBitExactly) {
  const Vec3 p0(1.2345678901234567, -0.1, 0.3333333333333333);
  EXPECT_EQ(init_coarse(p0).anchor_object_in_base0.position, p0);
  EXPECT_THROW(init_coarse(Vec3(std::nan(""), 0, 0)), InvalidArgument);
}

TEST(Coarse, OdometryTranslationAgainstOracle) {
  State s = update_odometry(init_coarse(Vec3(3, 0, 0)), translate(1, 0, 0));
  const auto e = query_pose(s, static_cfg());
  const auto want = oracle::mul(oracle::inv(oracle::translation(1, 0, 0)), oracle::translation(3, 0, 0));
  EXPECT_LE(oracle::max_diff(want, e.pose()), 1e-15);
  EXPECT_EQ(e.position, Vec3(2, 0, 0));
}

TEST(Coarse, OdometryYawAgainstOracle) {
  const Pose yaw90{Vec3::Zero(), rot_z(kPi / 2)};
  const auto e = query_pose(update_odometry(init_coarse(Vec3(3, 0, 0)), yaw90), static_cfg());
  const auto want = oracle::mul(oracle::inv(oracle::from_pose(yaw90)), oracle::translation(3, 0, 0));
  EXPECT_LE(oracle::max_diff(want, e.pose()), 1e-15);
  EXPECT_NEAR(e.position.x(), 0.0, 1e-15);
  EXPECT_NEAR(e.position.y(), -3.0, 1e-15);
  EXPECT_NEAR(yaw_of(e.rotation), -kPi / 2, 1e-15);
}

TEST(Detection, FirstDetectionSwitchesToFine) {
  State s = init_coarse(Vec3(3, 0, 0));
  s = update_detection(s, translate(2, 0, 0), kFk);
  EXPECT_EQ(s.mode, Mode::Fine);
  EXPECT_EQ(query_pose(s, static_cfg()).position, Vec3(2, 0, 0));
}

TEST(Detection, AbsentInCoarseStaysCoarse) {
  const State s = update_detection(init_coarse(Vec3(3, 0, 0)), std::nullopt, kFk);
  EXPECT_EQ(s.mode, Mode::Coarse);
}

TEST(Detection, LossWhileFinePropagates) {
  State s = update_detection(init_coarse(Vec3(3, 0, 0)), translate(2, 0, 0), kFk);
  s = update_detection(s, std::nullopt, kFk);
  EXPECT_EQ(s.mode, Mode::Propagating);
  // No motion since the anchor: exactly the last fused estimate.
  EXPECT_EQ(query_pose(s, static_cfg()).pose(), translate(2, 0, 0));
}

TEST(Detection, InvalidRotationThrows) {
  Pose bad = translate(1, 0, 0);
  bad.rotation(0, 0) = 2.0;
  EXPECT_THROW(update_detection(init_coarse(Vec3::Zero()), bad, kFk), InvalidArgument);
}

TEST(Propagating, AdvanceTowardStaticObjectAgainstOracle) {
  // Object seen 2 m ahead (z = 0.3), then the robot walks 1 m forward.
  State s = init_coarse(Vec3(2, 0, 0.3));
  s = update_detection(s, translate(2, 0, 0.3), kFk);
  s = update_odometry(s, translate(1, 0, 0));
  s = update_detection(s, std::nullopt, kFk);
  const auto e = query_pose(s, static_cfg());
  const auto want = oracle::mul(oracle::inv(oracle::translation(1, 0, 0)), oracle::translation(2, 0, 0.3));
  EXPECT_LE(oracle::max_diff(want, e.pose()), 1e-9);
  EXPECT_NEAR(e.position.x(), 1.0, 1e-9);
  EXPECT_NEAR(e.position.z(), 0.3, 1e-9);
}

TEST(GraspPhase, StaticObjectRejected) {
  const State s = init_coarse(Vec3(0.3, 0, 0));
  EXPECT_THROW(update_grasp_phase(s, static_cfg(), query_pose(s, static_cfg()), false), InvalidState);
}

TEST(GraspPhase, FarDynamicObjectBehavesStatic) {
  Localizer loc(dynamic_cfg(), Vec3(0.8, 0, 0));
  const auto e = loc.step(Pose::identity(), std::nullopt, kFk, false);
  EXPECT_FALSE(loc.state().grasp_phase);
  EXPECT_EQ(e.mode, Mode::Coarse);
  EXPECT_FALSE(e.masked);
}

TEST(GraspPhase, NearThenOutOfViewMasks) {
  Localizer loc(dynamic_cfg(), Vec3(3, 0, 0));
  loc.step(Pose::identity(), translate(0.4, 0, 0), kFk, true);
  EXPECT_TRUE(loc.state().grasp_phase);
  const auto e = loc.step(Pose::identity(), std::nullopt, kFk, false);
  EXPECT_EQ(e.mode, Mode::Masked);
  EXPECT_TRUE(e.masked);
  EXPECT_EQ(e.position, Vec3::Zero());
  EXPECT_EQ(e.rotation, Mat3::Identity());

  // Back in view without a detection: hold the last anchors.
  const auto back = loc.step(Pose::identity(), std::nullopt, kFk, true);
  EXPECT_EQ(back.mode, Mode::Propagating);
  EXPECT_EQ(back.position, Vec3(0.4, 0, 0));
  // Latched: moving away does not clear the phase.
  loc.step(translate(-5, 0, 0), translate(5.4, 0, 0), kFk, true);
  EXPECT_TRUE(loc.state().grasp_phase);
}

TEST(GraspPhase, HeldObjectKeepsBaseFramePose) {
  Localizer loc(dynamic_cfg(), Vec3(3, 0, 0));
  loc.step(Pose::identity(), translate(0.4, 0, 0), kFk, true);
  const auto e = loc.step(translate(2, 0, 0), std::nullopt, kFk, true);
  EXPECT_EQ(e.mode, Mode::Propagating);
  EXPECT_EQ(e.position, Vec3(0.4, 0, 0));
}

TEST(GraspPhase, StaticNeverMasksNearby) {
  Localizer loc(static_cfg(), Vec3(0.2, 0, 0));
  for (int i = 0; i < 5; ++i) {
    const auto e = loc.step(Pose::identity(), std::nullopt, kFk, false);
    EXPECT_FALSE(e.masked);
  }
}

TEST(ModeMonotonicity, NeverReturnsToCoarse) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    Localizer loc(rng.bernoulli(0.5) ? dynamic_cfg() : static_cfg(), Vec3(rng.uniform(0, 3), 0, 0));
    bool fine_seen = false;
    for (int t = 0; t < 100; ++t) {
      std::optional<Pose> det;
      if (rng.bernoulli(0.3)) det = translate(rng.uniform(0.2, 3), rng.uniform(-1, 1), 0);
      const auto e = loc.step(translate(0.01 * t, 0, 0), det, kFk, rng.bernoulli(0.7));
      fine_seen = fine_seen || e.mode == Mode::Fine;
      if (fine_seen) {
        EXPECT_NE(e.mode, Mode::Coarse);
      }
      if (loc.config().object_class == ObjectClass::Static) {
        EXPECT_NE(e.mode, Mode::Masked);
      }
    }
  }
}

TEST(ZeroNoise, EveryScriptedTrajectoryMatchesTruthAndOracle) {
  using testing_helpers::compare_on_scene;
  using testing_helpers::exact_scene;
  using testing_helpers::true_prior;
  for (auto kind : {sim::TrajectoryKind::Approach, sim::TrajectoryKind::ApproachTurnSit,
                    sim::TrajectoryKind::ApproachCarry}) {
    const auto scene = exact_scene(kind);
    const auto cls = kind == sim::TrajectoryKind::ApproachCarry ? ObjectClass::Dynamic : ObjectClass::Static;
    const auto c = compare_on_scene(scene, true_prior(scene), cls);
    SCOPED_TRACE(std::string(sim::to_string(kind)));
    EXPECT_LT(c.max_truth_error, 1e-9);
    EXPECT_LT(c.max_oracle_diff, 1e-9);
    EXPECT_TRUE(c.modes_agree);
    EXPECT_TRUE(c.masked_flag_consistent);
    EXPECT_GT(c.mode_steps[0], 0u);
    EXPECT_GT(c.mode_steps[1], 0u);
  }
}

TEST(ZeroNoise, PropagatingEstimateFixedInWorld) {
  const auto scene = testing_helpers::exact_scene(sim::TrajectoryKind::ApproachTurnSit);
  const auto odom = sim::simulate_odometry(scene);
  Localizer loc(static_cfg(), testing_helpers::true_prior(scene));
  std::optional<Vec3> anchor_world;
  std::size_t propagating = 0;
  for (std::size_t t = 0; t < scene.size(); ++t) {
    const bool vis = sim::visibility(sim::camera_pose(scene.robot_gt[t], scene.camera), scene.object_gt[t],
                                     scene.camera, 0.0);
    const auto e = loc.step(odom[t], sim::simulate_detection(scene, t, vis), scene.camera.mount(), vis);
    if (e.mode != Mode::Propagating) continue;
    ++propagating;
    const Vec3 world = scene.robot_gt[t].transform_point(e.position);
    if (!anchor_world) anchor_world = world;
    EXPECT_LT((world - *anchor_world).norm(), 1e-9);
  }
  EXPECT_GT(propagating, 0u);
}

TEST(Noisy, LibraryMatchesOracleStateMachine) {
  for (auto kind : {sim::TrajectoryKind::Approach, sim::TrajectoryKind::ApproachTurnSit,
                    sim::TrajectoryKind::ApproachCarry}) {
    auto scene = sim::scripted_trajectory(kind, {});
    scene.tags.dropout_prob = 0.5;
    scene.odom.per_step_noise_sigma = 0.001;
    const auto cls = kind == sim::TrajectoryKind::ApproachCarry ? ObjectClass::Dynamic : ObjectClass::Static;
    const auto c = testing_helpers::compare_on_scene(scene, Vec3(4.6, 0.2, 0.4), cls);
    EXPECT_TRUE(c.modes_agree);
    EXPECT_LT(c.max_oracle_diff, 1e-9);
  }
}

TEST(Config, EpsilonMustBePositive) {
  Config c;
  c.epsilon = 0;
  EXPECT_THROW(Localizer(c, Vec3::Zero()), InvalidArgument);
}
