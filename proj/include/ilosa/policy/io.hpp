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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ilosa/policy/policy.hpp"

namespace ilosa::policy {

// {"format": "ilosa-policy", "version": 1, "config": {..},
//  "stabilization_gain": a, "attractor": <gp>, "stiffness": [<gp> x 3]}
nlohmann::json to_json(const PolicyState& policy);
// Throws InvalidArgument on a malformed document or when the stiffness
// models do not share the attractor's inputs.
PolicyState policy_from_json(const nlohmann::json& doc);

void save_policy(const PolicyState& policy, const std::string& path);
PolicyState load_policy(const std::string& path);

// Demonstration files: CSV with a header row and columns t,x,y,z, or JSON
// {"t": [..], "positions": [[x,y,z], ..]}. load_demo picks by extension.
TimedTrajectory read_demo_csv(const std::string& path);
TimedTrajectory demo_from_json(const nlohmann::json& doc);
TimedTrajectory load_demo(const std::string& path);
void write_demo_csv(const TimedTrajectory& demo, const std::string& path);
nlohmann::json to_json(const TimedTrajectory& demo);

}  // namespace ilosa::policy
