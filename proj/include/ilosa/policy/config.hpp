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

#include <nlohmann/json.hpp>

namespace ilosa::policy {

struct PolicyConfig {
  double attractor_limit = 0.05;      // Delta_lim, m per axis
  double stiffness_mean = 300.0;      // K_mean, N/m
  double stiffness_min = 0.0;         // K_min, N/m
  double stiffness_max = 600.0;       // K_max, N/m
  double max_stabilization_force = 15.0;  // f_max, N
  double uncertainty_threshold = 0.9;     // theta, relative to Sigma_max
  double append_threshold = 0.3;          // Sigma_threshold / Sigma_max
  double feedback_gain = 0.01;            // m per unit device input
  double control_period = 0.01;           // s

  // Ablation switches. `stabilization` turns the variance-gradient field on
  // or off; `bounded_attractor = false` leaves the attractor unbounded and
  // keeps the stiffness at its prior (force taught through distance only).
  bool stabilization = true;
  bool bounded_attractor = true;

  // Hyperparameter search for the attractor GP.
  double init_lengthscale = 0.05;
  double lengthscale_min = 0.01;
  double lengthscale_max = 0.1;
  double noise_ratio_min = 1e-2;  // sn2 lower bound over mean squared target
  int max_training_points = 400;
  int train_iterations = 200;

  // Throws InvalidArgument on violated invariants.
  void validate() const;
};

nlohmann::json to_json(const PolicyConfig& config);
// Missing keys keep `base` values; unknown keys are rejected.
PolicyConfig config_from_json(const nlohmann::json& doc,
                              const PolicyConfig& base = {});

}  // namespace ilosa::policy
