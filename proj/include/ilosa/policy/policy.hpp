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

#pragma once

#include <array>
#include <vector>

#include "ilosa/common.hpp"
#include "ilosa/gp/model.hpp"
#include "ilosa/policy/config.hpp"

namespace ilosa::policy {

// Recorded end-effector positions with their timestamps (s).
struct TimedTrajectory {
  std::vector<double> times;
  std::vector<Vec3> positions;

  size_t size() const { return positions.size(); }
  // Samples spaced `period` apart from `start`.
  static TimedTrajectory uniform(std::vector<Vec3> positions, double period,
                                 double start = 0.0);
};

// Linear interpolation onto a uniform grid of spacing `period` covering the
// recorded time span. Throws InvalidArgument on < 2 samples or
// non-increasing timestamps.
TimedTrajectory resample(const TimedTrajectory& demo, double period);

struct FeedbackEvent {
  Vec3 increment = Vec3::Zero();  // device units, |component| <= 1
  bool goal_flag = false;
  double timestamp = 0.0;

  void validate() const;
};

struct ControlCommand {
  Vec3 origin = Vec3::Zero();  // position at which the policy was queried
  Vec3 attractor_displacement = Vec3::Zero();
  Vec3 stiffness = Vec3::Zero();  // diagonal, N/m
  double variance = 0.0;
  double variance_rel = 0.0;  // variance / Sigma_max
  Vec3 stabilization_force = Vec3::Zero();  // diagnostic; folded into the above

  Vec3 attractor() const { return origin + attractor_displacement; }
  Vec3 spring_force() const {
    return stiffness.cwiseProduct(attractor_displacement);
  }
};

// One attractor GP (3 outputs) and three per-axis stiffness GPs over the
// same inputs. The stiffness models share the attractor's hyperparameters
// and factorization.
struct PolicyState {
  gp::GPModel attractor;
  std::array<gp::GPModel, 3> stiffness;
  PolicyConfig config;
  double stabilization_gain = 0.0;  // nominal alpha

  bool empty() const { return attractor.empty(); }
  Eigen::Index size() const { return attractor.size(); }
  double sigma_max() const { return attractor.hyper().signal_variance; }
};

// Trains the attractor GP on (x_{t-1}, x_t - x_{t-1}) pairs from every demo
// (each resampled to the control period) and builds the stiffness GPs with
// constant K_mean targets.
PolicyState init_from_demos(const std::vector<TimedTrajectory>& demos,
                            const PolicyConfig& config);

struct Increments {
  Vec3 displacement = Vec3::Zero();
  Vec3 stiffness = Vec3::Zero();
};

// Per-axis increments for one device event. Inside the attractor bound the
// event moves the attractor; at the bound (or while the stiffness is raised
// above K_mean) it changes the stiffness so the force matches the wanted
// displacement, dropping back to K_mean once that force fits within the bound.
Increments interpret_feedback(const FeedbackEvent& feedback,
                              const Vec3& displacement, const Vec3& stiffness,
                              const PolicyConfig& config);

enum class FeedbackBranch { kCorrect, kAppend };

const char* to_string(FeedbackBranch branch);

struct FeedbackOutcome {
  PolicyState policy;
  FeedbackBranch branch = FeedbackBranch::kCorrect;
};

// Applies a corrective (non-goal) event at x. Throws InvalidArgument for goal
// events; those go through mark_goal.
FeedbackOutcome apply_feedback(const PolicyState& policy, const Vec3& x,
                               const FeedbackEvent& feedback);

// Appends a zero-displacement, K_max sample at x.
FeedbackOutcome mark_goal(const PolicyState& policy, const Vec3& x);

Vec3 stabilization_force(const PolicyState& policy, const Vec3& x);

struct Modulated {
  Vec3 displacement = Vec3::Zero();
  Vec3 stiffness = Vec3::Zero();
};

// Folds f_stable into attractor and stiffness, then pulls the stiffness
// towards zero once variance / sigma_max exceeds the uncertainty threshold.
Modulated modulate(const Vec3& displacement, const Vec3& stiffness,
                   const Vec3& stabilization, double variance,
                   double sigma_max, const PolicyConfig& config);

ControlCommand query(const PolicyState& policy, const Vec3& x);

}  // namespace ilosa::policy
