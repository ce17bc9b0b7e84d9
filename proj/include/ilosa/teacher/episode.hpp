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

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ilosa/policy/policy.hpp"
#include "ilosa/sim/perturbation.hpp"
#include "ilosa/sim/simulator.hpp"
#include "ilosa/teacher/corrector.hpp"

namespace ilosa::teacher {

struct EpisodeOptions {
  double duration = 30.0;  // s
  double control_period = 0.01;  // s; must equal sim.dt * sim.substeps
  sim::SimParams sim;
  std::optional<sim::PerturbationSpec> perturbation;
  // The episode stops early once the end-effector leaves this region.
  std::optional<sim::AxisBox> workspace;
  bool record_ticks = true;
  // Early stops for teaching rounds: seconds after the corrector marked the
  // goal, and completed laps of a cyclic reference (0 disables).
  double stop_after_goal = std::numeric_limits<double>::infinity();
  int stop_after_laps = 0;

  void validate() const;
};

// One control tick: the state at the start of the tick and the command held
// over it.
struct TickRecord {
  double time = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  policy::ControlCommand command;
  Vec3 env_force = Vec3::Zero();
  double normal_force = 0.0;
  Vec3 perturbation = Vec3::Zero();  // at the start of the tick
  int feedback = 0;  // 0 none, 1 corrective, 2 goal
  int branch = -1;   // -1 none, 0 correct, 1 append
  long database_size = 0;
};

struct FeedbackRecord {
  long tick = 0;
  double time = 0.0;
  Vec3 position = Vec3::Zero();
  policy::FeedbackEvent event;
  policy::FeedbackBranch branch = policy::FeedbackBranch::kCorrect;
  long size_before = 0;
  long size_after = 0;
};

struct EpisodeLog {
  std::vector<TickRecord> ticks;
  std::vector<FeedbackRecord> feedback;
  policy::PolicyState policy;  // after all feedback
  sim::SimState final_state;
  bool left_workspace = false;
  long obstacle_ticks = 0;
  bool plug_released = false;
  double release_time = 0.0;
  double control_period = 0.01;
};

class EpisodeDiverged : public SimulationDiverged {
 public:
  EpisodeDiverged(const std::string& what, EpisodeLog partial)
      : SimulationDiverged(what), partial_(std::move(partial)) {}
  const EpisodeLog& partial() const { return partial_; }

 private:
  EpisodeLog partial_;
};

// 100 Hz loop: corrector observes the state, feedback is applied at the
// current position, the policy is queried, and the command is held for
// sim.substeps physics steps. Deterministic given the inputs.
EpisodeLog run_episode(const policy::PolicyState& policy, const sim::Environment& env,
                       const Vec3& start, ScriptedCorrector* corrector,
                       const EpisodeOptions& options);

}  // namespace ilosa::teacher
