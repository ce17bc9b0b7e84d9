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
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "ilosa/common.hpp"

namespace ilosa::sim {

// Per-axis force drawn from Normal(mean, stddev) and held for hold_interval.
// Active on [start_time, end_time).
struct PerturbationSpec {
  double mean = 10.0;         // N
  double stddev = 5.0;        // N
  double hold_interval = 0.2; // s
  std::uint64_t seed = 0;
  bool signed_mode = false;   // multiply each axis by a random sign
  double start_time = 0.0;
  double end_time = std::numeric_limits<double>::infinity();

  void validate() const;
};

// The distributions live here with the engine: std::normal_distribution
// caches its second variate, so a fresh one per call would make the draws
// depend on how calls are grouped.
struct PerturbationState {
  std::mt19937_64 rng;
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin{0.5};
  long interval = -1;
  Vec3 value = Vec3::Zero();
};

PerturbationState make_perturbation_state(const PerturbationSpec& spec);

// Force at time t. Advances `state` through every hold boundary up to t, so
// the sequence depends only on the seed and not on the query times.
Vec3 sample_perturbation(const PerturbationSpec& spec, double t,
                         PerturbationState& state);

nlohmann::json to_json(const PerturbationSpec& spec);
PerturbationSpec perturbation_from_json(const nlohmann::json& doc,
                                        const PerturbationSpec& base = {});

}  // namespace ilosa::sim
