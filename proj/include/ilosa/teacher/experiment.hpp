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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ilosa/policy/config.hpp"
#include "ilosa/sim/environment.hpp"
#include "ilosa/sim/perturbation.hpp"
#include "ilosa/sim/simulator.hpp"
#include "ilosa/teacher/corrector.hpp"
#include "ilosa/teacher/demos.hpp"
#include "ilosa/teacher/episode.hpp"

namespace ilosa::teacher {

struct PresetSpec {
  std::string name;
  std::string task;
  std::vector<int> variants{0};
  policy::PolicyConfig policy;
  sim::Environment env;
  sim::SimParams sim;
  CorrectorConfig corrector;
  DemoOptions demo;
  int teaching_rounds = 3;
  double teach_duration = 40.0;  // s per round
  double eval_duration = 20.0;   // s
  double settle_after_goal = 1.0;  // s a teaching round continues after goal
  Vec3 start = Vec3::Zero();
  sim::AxisBox workspace{Vec3::Constant(-1.0), Vec3::Constant(1.0)};
  // perturbed_goal_prior_ablation
  sim::PerturbationSpec perturbation;
  // wipe presets
  int loops = 5;
  double force_threshold = 8.0;  // N
  double loop_radius = 0.02;     // m
  // box_contact_loss_ablation: removal when the robot crosses this
  // coordinate along the push direction in an unperturbed run
  double removal_progress = 0.15;
  double speed_window = 1.0;  // s after removal over which the peak is taken
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
};

std::vector<std::string> known_presets();
// Built-in defaults. Throws InvalidArgument on an unknown name.
PresetSpec default_preset(const std::string& name);
// Overrides are an object with any of: policy, env, sim, corrector,
// perturbation (objects) and teaching_rounds, teach_duration,
// eval_duration, settle_after_goal, loops, force_threshold, seeds, ...
PresetSpec apply_overrides(PresetSpec spec, const nlohmann::json& overrides);
nlohmann::json to_json(const PresetSpec& spec);

// {"presets": {"<name>": {overrides}}}; missing presets keep defaults.
std::map<std::string, PresetSpec> load_presets(const std::string& path);
std::map<std::string, PresetSpec> presets_from_json(const nlohmann::json& doc);

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::map<std::string, double> values;  // NaN when undefined
  std::vector<std::pair<std::string, EpisodeLog>> logs;  // label, log
  std::optional<policy::PolicyState> policy;
};

struct ExperimentTable {
  std::string preset;
  std::vector<std::string> columns;
  std::vector<SeedOutcome> seeds;

  // Column statistics over seeds, ignoring NaN. NaN when all are NaN.
  double max(const std::string& column) const;
  double mean(const std::string& column) const;
  double min(const std::string& column) const;
};

struct ExperimentOptions {
  bool keep_logs = true;
};

// Runs the preset pipeline for every seed (in parallel) and collects the
// per-seed metrics.
ExperimentTable run_experiment(const PresetSpec& spec, const ExperimentOptions& options = {});
SeedOutcome run_seed(const PresetSpec& spec, std::uint64_t seed,
                     const ExperimentOptions& options = {});

// Rows "seed <n>" followed by max / mean / min.
void write_table_csv(const ExperimentTable& table, const std::string& path);
std::string format_table(const ExperimentTable& table);

}  // namespace ilosa::teacher
