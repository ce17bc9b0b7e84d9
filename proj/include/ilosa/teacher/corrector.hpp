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

#include <nlohmann/json.hpp>

#include "ilosa/policy/policy.hpp"
#include "ilosa/sim/simulator.hpp"
#include "ilosa/teacher/demos.hpp"

namespace ilosa::teacher {

struct CorrectorConfig {
  int period_ticks = 10;        // emit at most every this many control ticks
  double dead_band = 0.005;     // m of lateral error before correcting
  double error_scale = 0.02;    // m of error mapped to a full unit input
  double teach_speed = 0.1;     // m/s wanted along the path
  double speed_dead_band = 0.01;  // m/s
  double speed_scale = 0.1;     // m/s of speed error mapped to a unit input
  double goal_slowdown = 2.0;   // 1/s; wanted speed <= this * remaining arc
  double approach_distance = 0.03;  // m of remaining arc using goal error
  double goal_tolerance = 0.01; // m
  double goal_speed = 0.01;     // m/s
  bool mark_goal = true;
  double min_component = 0.05;  // smaller device components are dropped
  double lookahead = 0.08;      // m of arc searched ahead of the progress
  double lookback = 0.02;       // m searched behind
  // Contact force shaping. Disabled when target_force == 0.
  double target_force = 0.0;    // N
  double force_band = 2.0;      // N below target tolerated without feedback
  double force_scale = 10.0;    // N of deficit mapped to a unit input
  Vec3 force_direction = -Vec3::UnitZ();  // into the contact surface
  double active_until = std::numeric_limits<double>::infinity();  // s

  void validate() const;
};

nlohmann::json to_json(const CorrectorConfig& config);
CorrectorConfig corrector_config_from_json(const nlohmann::json& doc,
                                           const CorrectorConfig& base = {});

// Proportional stand-in for the human teacher. Tracks progress along the
// reference, corrects lateral error and speed along the path, pushes into
// contact surfaces when force is short, and marks the goal once at rest.
class ScriptedCorrector {
 public:
  ScriptedCorrector(ReferencePath reference, const Vec3& goal, bool cyclic,
                    CorrectorConfig config);

  // Called once per control tick with the current state.
  std::optional<policy::FeedbackEvent> observe(long tick, const sim::SimState& state);

  double progress() const { return progress_; }  // arc length, unwrapped
  int laps() const;
  bool goal_marked() const { return goal_marked_; }
  const ReferencePath& reference() const { return reference_; }
  const CorrectorConfig& config() const { return config_; }

 private:
  ReferencePath reference_;
  Vec3 goal_;
  bool cyclic_;
  CorrectorConfig config_;
  double progress_ = 0.0;
  bool goal_marked_ = false;
  long last_emit_ = std::numeric_limits<long>::min() / 2;
};

}  // namespace ilosa::teacher
