// Copyright 2026 The ILoSA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "ilosa/teacher/corrector.hpp"
#include "ilosa/teacher/demos.hpp"
#include "ilosa/teacher/episode.hpp"
#include "ilosa/teacher/experiment.hpp"
#include "ilosa/teacher/log_io.hpp"
#include "ilosa/teacher/metrics.hpp"

namespace ilosa::teacher {
namespace {

FeedbackRecord record(policy::FeedbackBranch branch, bool goal = false) {
  FeedbackRecord r;
  r.branch = branch;
  r.event.goal_flag = goal;
  return r;
}

EpisodeLog circle_log(int laps, int per_lap, double radius, double wobble = 0.0) {
  EpisodeLog log;
  for (int i = 0; i <= laps * per_lap; ++i) {
    const double a = 2 * std::numbers::pi * i / per_lap;
    const int lap = i / per_lap;
    const double r = radius + wobble * lap;
    TickRecord t;
    t.time = 0.01 * i;
    t.position = Vec3(r * std::sin(a), r - r * std::cos(a), 0.0);
    t.normal_force = (i % 10 == 0) ? 2.0 : 10.0;
    log.ticks.push_back(t);
  }
  return log;
}

TEST(Metrics, DataEfficiencyCountsAppends) {
  // 40 events of which 2 grew the database: 38 / 40 = 95 %.
  std::vector<FeedbackRecord> fb(38, record(policy::FeedbackBranch::kCorrect));
  fb.push_back(record(policy::FeedbackBranch::kAppend));
  fb.push_back(record(policy::FeedbackBranch::kAppend, true));
  EXPECT_DOUBLE_EQ(*data_efficiency(fb), 95.0);
  EXPECT_EQ(append_count(fb), 2);
  EXPECT_DOUBLE_EQ(*data_efficiency(40, 2), 95.0);
  EXPECT_FALSE(data_efficiency(std::vector<FeedbackRecord>{}).has_value());
}

TEST(Metrics, GoalErrorPeakSpeedAndFeedbackTime) {
  EpisodeLog log;
  log.control_period = 0.01;
  for (int i = 0; i < 5; ++i) {
    TickRecord t;
    t.time = 0.01 * i;
    t.velocity = Vec3(0.1 * i, 0, 0);
    log.ticks.push_back(t);
  }
  log.feedback.push_back(record(policy::FeedbackBranch::kCorrect));
  log.feedback.push_back(record(policy::FeedbackBranch::kAppend, true));
  log.final_state.position = Vec3(0.3, 0.4, 0.0);
  EXPECT_DOUBLE_EQ(goal_error(log, Vec3::Zero()), 0.5);
  EXPECT_DOUBLE_EQ(peak_speed(log), 0.4);
  EXPECT_DOUBLE_EQ(peak_speed(log, 0.0, 0.025), 0.2);
  EXPECT_DOUBLE_EQ(feedback_time(log), 0.01);
}

TEST(Metrics, ResampleByArcLength) {
  // Uneven sampling of a straight segment of length 1.
  const Trace t{Vec3(0, 0, 0), Vec3(0.1, 0, 0), Vec3(0.9, 0, 0), Vec3(1, 0, 0)};
  const Trace r = resample_trace(t, 5);
  ASSERT_EQ(r.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(r[i].x(), 0.25 * i, 1e-12);
}

TEST(Metrics, TraceRmseOfOffsetCopies) {
  Trace a, b;
  for (int i = 0; i <= 50; ++i) {
    a.push_back(Vec3(0.02 * i, 0, 0));
    b.push_back(Vec3(0.02 * i, 0.003, 0.004));
  }
  EXPECT_NEAR(trace_rmse(a, b), 0.005, 1e-12);
}

TEST(Metrics, SplitsLoopsAtTheStart) {
  const EpisodeLog log = circle_log(5, 400, 0.1);
  const auto loops = split_loops(log, Vec3::Zero(), 0.02, 0.08);
  ASSERT_EQ(loops.size(), 5u);
  EXPECT_LE(loop_consistency(loops), 1e-3);
  const auto ticks = split_loop_ticks(log, Vec3::Zero(), 0.02, 0.08);
  ASSERT_EQ(ticks.size(), 5u);
  EXPECT_NEAR(force_coverage(ticks[0], 8.0), 0.9, 0.01);
}

TEST(Metrics, LoopConsistencyGrowsWithDrift) {
  // Radii 0.1 and 0.101: pointwise distance 0.001 * |2 sin(a/2)| -> RMS
  // sqrt(2) * 0.001 between the first two loops.
  const auto loops = split_loops(circle_log(2, 400, 0.1, 0.001), Vec3::Zero(), 0.02, 0.08);
  ASSERT_EQ(loops.size(), 2u);
  EXPECT_NEAR(loop_consistency(loops), std::sqrt(2.0) * 0.001, 1e-4);
}

TEST(Demos, BoundedSpeedAndPinnedEnds) {
  for (const std::string task : {"unplug", "box", "plug_insert"}) {
    const auto geo = task_geometry(task);
    const auto demo = scripted_demo(task, 0, 3);
    const auto& p = demo.trajectory.positions;
    ASSERT_GT(p.size(), 10u);
    double vmax = 0.0;
    for (size_t i = 1; i < p.size(); ++i) vmax = std::max(vmax, (p[i] - p[i - 1]).norm() / 0.01);
    EXPECT_LE(vmax, 0.25) << task;
    EXPECT_LE((p.front() - geo.path.start()).norm(), 1e-9) << task;
    EXPECT_LE((p.back() - geo.path.end()).norm(), 1e-9) << task;
  }
  EXPECT_THROW(task_geometry("juggle"), InvalidArgument);
}

TEST(Demos, SeedChangesOnlyTheJitter) {
  const auto a = scripted_demo("unplug", 0, 1), b = scripted_demo("unplug", 0, 2);
  ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
  double diff = 0.0;
  for (size_t i = 0; i < a.trajectory.size(); ++i)
    diff = std::max(diff, (a.trajectory.positions[i] - b.trajectory.positions[i]).norm());
  EXPECT_GT(diff, 0.0);
  EXPECT_LE(diff, 2 * DemoOptions{}.jitter + 1e-12);
}

TEST(Episode, CorrectorTeachesUnplug) {
  const auto geo = task_geometry("unplug", 1);
  const auto demo = scripted_demo("unplug", 1, 9);
  const auto p = policy::init_from_demos({demo.trajectory}, policy::PolicyConfig{});
  sim::Environment env;
  env.kind = sim::EnvKind::kPlug;
  env.plug.socket = geo.path.start();
  ScriptedCorrector corrector(geo.path, geo.goal, false, CorrectorConfig{});
  EpisodeOptions opt;
  opt.duration = 15.0;
  const EpisodeLog log = run_episode(p, env, geo.path.start(), &corrector, opt);
  EXPECT_TRUE(log.plug_released);
  EXPECT_TRUE(corrector.goal_marked());
  EXPECT_LT(goal_error(log, geo.goal), 0.03);
  EXPECT_GE(*data_efficiency(log.feedback), 90.0);
  // Ticks are the state at the start of each period.
  ASSERT_GT(log.ticks.size(), 2u);
  EXPECT_NEAR(log.ticks[1].time - log.ticks[0].time, 0.01, 1e-12);
}

TEST(Episode, RepeatRunsAreBitIdentical) {
  const auto demo = scripted_demo("unplug", 0, 4);
  const auto p = policy::init_from_demos({demo.trajectory}, policy::PolicyConfig{});
  sim::Environment env;
  EpisodeOptions opt;
  opt.duration = 4.0;
  sim::PerturbationSpec pert;
  pert.seed = 12;
  opt.perturbation = pert;
  const auto a = run_episode(p, env, demo.trajectory.positions.front(), nullptr, opt);
  const auto b = run_episode(p, env, demo.trajectory.positions.front(), nullptr, opt);
  ASSERT_EQ(a.ticks.size(), b.ticks.size());
  for (size_t i = 0; i < a.ticks.size(); ++i) {
    ASSERT_EQ(a.ticks[i].position, b.ticks[i].position);
    ASSERT_EQ(a.ticks[i].perturbation, b.ticks[i].perturbation);
  }
}

TEST(Episode, OptionsValidateControlPeriod) {
  EpisodeOptions opt;
  opt.sim.substeps = 7;
  EXPECT_THROW(opt.validate(), InvalidArgument);
}

TEST(LogIo, CsvRoundTrip) {
  const auto demo = scripted_demo("unplug", 0, 4);
  const auto p = policy::init_from_demos({demo.trajectory}, policy::PolicyConfig{});
  EpisodeOptions opt;
  opt.duration = 0.5;
  const auto log = run_episode(p, sim::Environment{}, demo.trajectory.positions.front(), nullptr, opt);
  const auto path = std::filesystem::temp_directory_path() / "ilosa_log_roundtrip.csv";
  write_log_csv(log, path.string());
  const auto back = read_log_csv(path.string());
  std::filesystem::remove(path);
  ASSERT_EQ(back.size(), log.ticks.size());
  EXPECT_NEAR((back.back().position - log.ticks.back().position).norm(), 0.0, 1e-9);
  EXPECT_EQ(back.back().database_size, log.ticks.back().database_size);
}

TEST(Presets, OverridesAndValidation) {
  for (const auto& name : known_presets()) EXPECT_NO_THROW(default_preset(name)) << name;
  EXPECT_THROW(default_preset("nope"), InvalidArgument);
  auto spec = default_preset("unplug_single");
  spec = apply_overrides(spec, {{"seeds", {7, 8}}, {"policy", {{"stiffness_max", 700.0}}}});
  EXPECT_EQ(spec.seeds, (std::vector<std::uint64_t>{7, 8}));
  EXPECT_EQ(spec.policy.stiffness_max, 700.0);
  EXPECT_THROW(apply_overrides(spec, {{"colour", "red"}}), InvalidArgument);
  const auto again = apply_overrides(default_preset("unplug_single"), to_json(spec));
  EXPECT_EQ(to_json(again).dump(), to_json(spec).dump());
}

TEST(Presets, ShippedConfigLoads) {
  const auto presets = load_presets(ILOSA_SOURCE_DIR "/configs/experiments.json");
  EXPECT_EQ(presets.size(), known_presets().size());
}

TEST(Table, StatisticsIgnoreNaN) {
  ExperimentTable t;
  t.columns = {"a"};
  for (double v : {1.0, std::nan(""), 3.0}) {
    SeedOutcome s;
    s.values["a"] = v;
    t.seeds.push_back(s);
  }
  EXPECT_DOUBLE_EQ(t.mean("a"), 2.0);
  EXPECT_DOUBLE_EQ(t.max("a"), 3.0);
  EXPECT_DOUBLE_EQ(t.min("a"), 1.0);
}

}  // namespace
}  // namespace ilosa::teacher
