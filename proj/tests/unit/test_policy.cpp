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
#include <cstdio>
#include <filesystem>

#include <gtest/gtest.h>

#include "ilosa/gp/model.hpp"
#include "ilosa/policy/config.hpp"
#include "ilosa/policy/field.hpp"
#include "ilosa/policy/io.hpp"
#include "ilosa/policy/policy.hpp"
#include "ilosa/teacher/demos.hpp"

namespace ilosa::policy {
namespace {

PolicyState unplug_policy() {
  static const PolicyState p = [] {
    std::vector<TimedTrajectory> demos;
    for (int v = 0; v < 2; ++v) demos.push_back(teacher::scripted_demo("unplug", v, 5 + v).trajectory);
    return init_from_demos(demos, PolicyConfig{});
  }();
  return p;
}

FeedbackEvent event(double x, double y = 0.0, double z = 0.0) {
  FeedbackEvent ev;
  ev.increment = Vec3(x, y, z);
  return ev;
}

TEST(Resample, InterpolatesOntoUniformGrid) {
  TimedTrajectory demo;
  demo.times = {0.0, 0.015, 0.04};
  demo.positions = {Vec3(0, 0, 0), Vec3(0.03, 0, 0), Vec3(0.03, 0.05, 0)};
  const TimedTrajectory r = resample(demo, 0.01);
  ASSERT_EQ(r.size(), 5u);
  EXPECT_NEAR(r.positions[1].x(), 0.02, 1e-12);
  EXPECT_NEAR(r.positions[3].y(), 0.03, 1e-12);  // 0.03 = (0.03 - 0.015) / 0.025 * 0.05
  EXPECT_NEAR(r.times[4], 0.04, 1e-12);
}

TEST(Resample, RejectsShortOrUnorderedDemos) {
  TimedTrajectory one;
  one.times = {0.0};
  one.positions = {Vec3::Zero()};
  EXPECT_THROW(resample(one, 0.01), InvalidArgument);
  TimedTrajectory back;
  back.times = {0.0, 0.02, 0.01};
  back.positions = {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  EXPECT_THROW(resample(back, 0.01), InvalidArgument);
}

TEST(Init, TrainsOnDisplacementPairs) {
  const auto demo = TimedTrajectory::uniform(
      {Vec3(0, 0, 0), Vec3(0.001, 0, 0), Vec3(0.003, 0, 0), Vec3(0.006, 0, 0)}, 0.01);
  const PolicyState p = init_from_demos({demo}, PolicyConfig{});
  ASSERT_EQ(p.size(), 3);
  EXPECT_NEAR(p.attractor.targets()(2, 0), 0.003, 1e-15);
  for (int d = 0; d < 3; ++d) {
    EXPECT_TRUE(p.stiffness[d].shares_factorization(p.attractor));
    EXPECT_EQ(p.stiffness[d].targets()(0, 0), 300.0);
  }
}

TEST(Feedback, InsideBoundMovesAttractor) {
  const PolicyConfig c;
  const auto inc = interpret_feedback(event(1.0), Vec3(0.01, 0, 0), Vec3::Constant(300), c);
  EXPECT_NEAR(inc.displacement.x(), 0.01, 1e-15);
  EXPECT_EQ(inc.stiffness.x(), 0.0);
  EXPECT_EQ(inc.displacement.y(), 0.0);
}

TEST(Feedback, AtBoundRaisesStiffness) {
  // K 300, dx 0.07 + 0.01 = 0.08 beyond 0.05: K' = 300 * 0.08 / 0.05 = 480.
  const PolicyConfig c;
  const auto inc = interpret_feedback(event(1.0), Vec3(0.07, 0, 0), Vec3::Constant(300), c);
  EXPECT_NEAR(inc.stiffness.x(), 180.0, 1e-9);
  EXPECT_NEAR(0.07 + inc.displacement.x(), 0.05, 1e-15);
}

TEST(Feedback, RaisedStiffnessRelaxesToMean) {
  // K 480 at 0.05 (24 N); pulling back by 0.04 wants 480 * 0.01 = 4.8 N,
  // which K_mean renders at 0.016 m.
  const PolicyConfig c;
  const auto inc = interpret_feedback(event(-4.0), Vec3(0.05, 0, 0), Vec3::Constant(480), c);
  EXPECT_NEAR(480 + inc.stiffness.x(), 300.0, 1e-9);
  EXPECT_NEAR(0.05 + inc.displacement.x(), 0.016, 1e-12);
}

TEST(Feedback, StiffnessClampedToMaximum) {
  const PolicyConfig c;
  const auto inc = interpret_feedback(event(1.0), Vec3(0.05, 0, 0), Vec3::Constant(590), c);
  EXPECT_NEAR(590 + inc.stiffness.x(), c.stiffness_max, 1e-9);
}

TEST(Feedback, UnboundedAblationOnlyMovesAttractor) {
  PolicyConfig c;
  c.bounded_attractor = false;
  const auto inc = interpret_feedback(event(1.0), Vec3(0.2, 0, 0), Vec3::Constant(300), c);
  EXPECT_NEAR(inc.displacement.x(), 0.01, 1e-15);
  EXPECT_EQ(inc.stiffness.x(), 0.0);
}

TEST(Feedback, EventValidation) {
  EXPECT_THROW(event(1.5).validate(), InvalidArgument);
  EXPECT_NO_THROW(event(-1.0, 0.5, 1.0).validate());
}

TEST(Modulate, StabilizationWithinBoundShiftsAttractor) {
  const PolicyConfig c;
  const auto m = modulate(Vec3(0.01, 0, 0), Vec3::Constant(300), Vec3(3, 0, 0), 0.0, 1.0, c);
  EXPECT_NEAR(m.displacement.x(), 0.02, 1e-15);
  EXPECT_EQ(m.stiffness.x(), 300.0);
}

TEST(Modulate, ExcessForceGoesIntoStiffness) {
  // 300 * 0.04 + 9 = 21 N > 15 N: dx 0.05, K 420.
  const PolicyConfig c;
  const auto m = modulate(Vec3(0.04, 0, 0), Vec3::Constant(300), Vec3(9, 0, 0), 0.0, 1.0, c);
  EXPECT_DOUBLE_EQ(m.displacement.x(), 0.05);
  EXPECT_NEAR(m.stiffness.x(), 420.0, 1e-9);
}

TEST(Modulate, UncertaintyScalesStiffnessLinearly) {
  const PolicyConfig c;
  const auto at = [&](double rel) {
    return modulate(Vec3(0.01, 0, 0), Vec3::Constant(300), Vec3::Zero(), rel, 1.0, c).stiffness.x();
  };
  EXPECT_NEAR(at(0.95), 150.0, 1e-9);
  EXPECT_EQ(at(1.0), 0.0);
  EXPECT_EQ(at(0.5), 300.0);
  EXPECT_LE(std::abs(at(0.9 - 1e-10) - at(0.9 + 1e-10)), 1e-4 * 300.0);
}

TEST(Policy, FeedbackInsideFurrowCorrects) {
  const PolicyState p = unplug_policy();
  const Vec3 x = p.attractor.inputs().row(30).transpose();
  const auto before = query(p, x);
  const auto out = apply_feedback(p, x, event(0.0, 1.0, 0.0));
  EXPECT_EQ(out.branch, FeedbackBranch::kCorrect);
  EXPECT_EQ(out.policy.size(), p.size());
  const Vec3 mean_before = gp::predict_mean(p.attractor, x);
  const Vec3 mean_after = gp::predict_mean(out.policy.attractor, x);
  EXPECT_NEAR(mean_after.y() - mean_before.y(), 0.01, 1e-9);
  EXPECT_GT(query(out.policy, x).attractor_displacement.y(), before.attractor_displacement.y());
}

TEST(Policy, FeedbackFarFromDataAppends) {
  const PolicyState p = unplug_policy();
  const Vec3 x(0.8, 0.8, 0.8);
  const auto out = apply_feedback(p, x, event(1.0));
  EXPECT_EQ(out.branch, FeedbackBranch::kAppend);
  EXPECT_EQ(out.policy.size(), p.size() + 1);
  EXPECT_EQ(p.size(), unplug_policy().size());
}

TEST(Policy, GoalMarkAppendsStiffRestSample) {
  const PolicyState p = unplug_policy();
  const Vec3 x(0.25, 0.0, 0.1);
  const auto out = mark_goal(p, x).policy;
  ASSERT_EQ(out.size(), p.size() + 1);
  EXPECT_EQ(out.attractor.targets().row(out.size() - 1).norm(), 0.0);
  for (int d = 0; d < 3; ++d) EXPECT_EQ(out.stiffness[d].targets()(out.size() - 1, 0), p.config.stiffness_max);
}

TEST(Policy, FarFieldIsCompliant) {
  const PolicyState p = unplug_policy();
  const auto cmd = query(p, Vec3(5, 5, 5));
  EXPECT_LE(cmd.stiffness.maxCoeff(), 1e-9);
  EXPECT_LE(cmd.attractor_displacement.norm(), p.config.attractor_limit);
  EXPECT_NEAR(cmd.variance_rel, 1.0, 1e-9);
}

TEST(Policy, StabilizationPointsDownTheVarianceGradient) {
  const PolicyState p = unplug_policy();
  const Vec3 x = p.attractor.inputs().row(40).transpose() + Vec3(0, 0.03, 0);
  const Vec3 f = stabilization_force(p, x);
  const Vec3 g = gp::variance_gradient(p.attractor, x);
  EXPECT_LT(f.dot(g), 0.0);
  EXPECT_LE(f.norm(), p.config.max_stabilization_force + 1e-9);
}

TEST(Field, ParallelMatchesSerialAndLeavesPolicyAlone) {
  const PolicyState p = unplug_policy();
  FieldSpec spec;
  spec.slice_axis = 1;
  spec.lower = {-0.05, -0.05};
  spec.upper = {0.35, 0.3};
  spec.resolution = {21, 17};
  const auto before = to_json(p).dump();
  const FieldGrid a = evaluate_field(p, spec);
  const FieldGrid b = reference::evaluate_field(p, spec);
  ASSERT_EQ(a.cells.size(), 21u * 17u);
  for (size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].force, b.cells[i].force);
    EXPECT_EQ(a.cells[i].sigma_rel, b.cells[i].sigma_rel);
  }
  EXPECT_EQ(to_json(p).dump(), before);
  // Cell (iu, iv) = (2, 3) sits at x = -0.05 + 2 * 0.02, z = -0.05 + 3 * 0.021875.
  const Vec3 pos = a.cells[3 * 21 + 2].position;
  EXPECT_NEAR(pos.x(), -0.01, 1e-12);
  EXPECT_NEAR(pos.z(), -0.05 + 3 * 0.35 / 16, 1e-12);
}

TEST(Field, RejectsBadSpecs) {
  FieldSpec spec;
  spec.resolution = {0, 4};
  EXPECT_THROW(spec.validate(), InvalidArgument);
  spec = FieldSpec{};
  spec.slice_axis = 3;
  EXPECT_THROW(spec.validate(), InvalidArgument);
  EXPECT_THROW(evaluate_field(PolicyState{}, FieldSpec{}), InvalidArgument);
}

TEST(Io, PolicyRoundTripIsExact) {
  const PolicyState p = mark_goal(unplug_policy(), Vec3(0.25, 0, 0.1)).policy;
  const auto path = std::filesystem::temp_directory_path() / "ilosa_policy_roundtrip.json";
  save_policy(p, path.string());
  const PolicyState back = load_policy(path.string());
  std::filesystem::remove(path);
  for (const Vec3& q : {Vec3(0.1, 0, 0.1), Vec3(0.25, 0, 0.1), Vec3(0.5, 0.2, 0)}) {
    const auto a = query(p, q), b = query(back, q);
    // The factor is rebuilt on load; agreement to rounding.
    EXPECT_LE((a.attractor_displacement - b.attractor_displacement).norm(), 1e-12);
    EXPECT_LE((a.stiffness - b.stiffness).norm(), 1e-9);
  }
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_THROW(config_from_json(nlohmann::json{{"bogus", 1}}), InvalidArgument);
  const PolicyConfig c = config_from_json(nlohmann::json{{"stiffness_max", 800.0}});
  EXPECT_EQ(c.stiffness_max, 800.0);
  EXPECT_EQ(c.stiffness_mean, 300.0);
}

}  // namespace
}  // namespace ilosa::policy
