#include <gtest/gtest.h>

#include <sstream>

#include "hsi/experiment.hpp"

using namespace hsi;
using namespace hsi::experiment;

namespace {

std::string csv_of(const std::vector<TrialRecord>& recs) {
  std::ostringstream os;
  write_records_csv(os, recs);
  return os.str();
}

ScenarioConfig few_trials(ScenarioConfig c, int n) {
  c.trials = n;
  return c;
}

}  // namespace

TEST(Config, JsonRoundTrip) {
  ScenarioConfig c;
  c.trials = 5;
  c.tags.dropout_prob = 0.25;
  c.scenario.object_height = {0.3, 0.4};
  c.trajectories = {sim::TrajectoryKind::ApproachCarry};
  const auto back = config_from_json(json::parse(config_to_json(c).dump()));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Config, AbsentKeysKeepDefaults) {
  const auto c = config_from_json({{"version", 1}, {"trials", 3}});
  EXPECT_EQ(c.trials, 3);
  EXPECT_EQ(c.tags.dropout_prob, calibrated_tags().dropout_prob);
  EXPECT_EQ(c.camera.max_range, 2.5);
}

TEST(Config, RejectsUnknownKeysAndBadVersion) {
  EXPECT_THROW(config_from_json({{"version", 1}, {"trails", 3}}), FormatError);
  EXPECT_THROW(config_from_json({{"version", 1}, {"camera", {{"fov", 3}}}}), FormatError);
  EXPECT_THROW(config_from_json({{"version", 2}}), FormatError);
  EXPECT_THROW(config_from_json({{"trials", 3}}), FormatError);
  EXPECT_THROW(config_from_json({{"version", 1}, {"trials", "many"}}), FormatError);
}

TEST(Config, RejectsInvalidValues) {
  EXPECT_THROW(config_from_json({{"version", 1}, {"trials", 0}}), InvalidArgument);
  EXPECT_THROW(config_from_json({{"version", 1}, {"scenario", {{"object_height", {0.6, 0.2}}}}}), InvalidArgument);
  EXPECT_THROW(config_from_json({{"version", 1}, {"tags", {{"dropout_prob", 1.5}}}}), InvalidArgument);
}

TEST(Config, ShippedFilesParse) {
  const auto def = read_config(std::string(HSI_CONFIG_DIR) + "/default.json");
  EXPECT_EQ(config_to_json(def), config_to_json(ScenarioConfig{}));
  const auto zero = read_config(std::string(HSI_CONFIG_DIR) + "/zero_noise.json");
  EXPECT_EQ(config_to_json(zero), config_to_json(ScenarioConfig::zero_noise()));
  EXPECT_THROW(read_config("/nonexistent/config.json"), FormatError);
}

TEST(Scenario, ObjectPlacementInsideRanges) {
  const ScenarioConfig c;
  for (int i = 0; i < 30; ++i) {
    const auto scene = make_trial_scene(c, 9, i, sim::TrajectoryKind::Approach);
    const Vec3 obj = scene.object_gt.front().position;
    EXPECT_GE(obj.z(), 0.2);
    EXPECT_LE(obj.z(), 0.6);
    const double d = obj.head<2>().norm();
    EXPECT_GE(d, 4.0 - 1e-12);
    EXPECT_LE(d, 6.0 + 1e-12);
  }
}

TEST(Scenario, CoarsePriorOffsetIsHorizontal) {
  const ScenarioConfig c;
  const auto scene = make_trial_scene(c, 4, 2, sim::TrajectoryKind::Approach);
  const Vec3 truth = compose(inverse(scene.robot_gt.front()), scene.object_gt.front()).position;
  const Vec3 prior = coarse_prior(c, 4, 2, scene);
  EXPECT_NEAR((prior - truth).norm(), 0.3, 1e-12);
  EXPECT_EQ(prior.z(), truth.z());
}

TEST(Run, ZeroNoiseTracksTruth) {
  const auto recs = run_localization(ScenarioConfig::zero_noise(), 1, 4);
  const auto s = summarize(recs);
  ASSERT_EQ(s.trials.size(), 17u);
  EXPECT_LT(s.max_error, 1e-9);
  for (const auto& c : internal_checks(ScenarioConfig::zero_noise(), s)) EXPECT_TRUE(c.pass) << c.name;
}

TEST(Run, SameSeedSameCsvAnyThreadCount) {
  const auto cfg = few_trials(ScenarioConfig{}, 6);
  const std::string one = csv_of(run_localization(cfg, 77, 1));
  EXPECT_EQ(one, csv_of(run_localization(cfg, 77, 4)));
  EXPECT_NE(one, csv_of(run_localization(cfg, 78, 4)));
}

TEST(Run, MaskedRowsHaveNanError) {
  const auto recs = run_localization(few_trials(ScenarioConfig{}, 3), 5, 1);
  std::size_t masked = 0;
  for (const auto& rec : recs) {
    for (const auto& r : rec.rows) {
      if (r.masked) {
        ++masked;
        EXPECT_TRUE(std::isnan(r.error));
        EXPECT_EQ(r.mode, localization::Mode::Masked);
      } else {
        EXPECT_FALSE(std::isnan(r.error));
      }
    }
  }
  // Trial 2 carries the object.
  EXPECT_GT(masked, 0u);
}

TEST(Run, CalibratedStatistics) {
  const ScenarioConfig cfg;
  const auto s = summarize(run_localization(cfg, 1, 4));
  EXPECT_GE(s.coarse_mean, 0.2);
  EXPECT_LE(s.coarse_mean, 0.5);
  EXPECT_LE(s.fine_mean, 0.1);
  EXPECT_LE(s.transition_max, 2.5);
  EXPECT_LE(s.transition_min, 2.4);
  EXPECT_GE(s.transition_max, 2.4);
}

TEST(Output, CsvShape) {
  const auto recs = run_localization(few_trials(ScenarioConfig::zero_noise(), 2), 3, 1);
  std::istringstream in(csv_of(recs));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kRecordsHeader);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 13);
    ++rows;
  }
  EXPECT_EQ(rows, recs[0].rows.size() + recs[1].rows.size());
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(Output, SummaryJsonUsesNullForNan) {
  Summary s;
  s.trials.push_back({});
  const json j = summary_to_json(s, 1, {{"c", true}});
  EXPECT_EQ(j.at("format"), "hsi-localize-summary");
  EXPECT_TRUE(j.at("coarse_mean_error").is_null());
  EXPECT_TRUE(j.at("trials")[0].at("transition_distance").is_null());
  EXPECT_EQ(j.at("checks").at("c"), true);
}
