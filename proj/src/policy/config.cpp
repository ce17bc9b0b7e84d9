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

#include "ilosa/policy/config.hpp"

#include <cmath>
#include <string>

#include "ilosa/common.hpp"

namespace ilosa::policy {

using nlohmann::json;

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(std::string("policy config: ") + what);
}

}  // namespace

void PolicyConfig::validate() const {
  require(std::isfinite(attractor_limit) && attractor_limit > 0.0,
          "attractor_limit must be > 0");
  require(stiffness_min >= 0.0 && stiffness_min <= stiffness_mean &&
              stiffness_mean <= stiffness_max && std::isfinite(stiffness_max),
          "need 0 <= stiffness_min <= stiffness_mean <= stiffness_max");
  require(max_stabilization_force > 0.0, "max_stabilization_force must be > 0");
  require(uncertainty_threshold > 0.0 && uncertainty_threshold < 1.0,
          "uncertainty_threshold must be in (0, 1)");
  require(append_threshold > 0.0 && append_threshold < 1.0,
          "append_threshold must be in (0, 1)");
  require(feedback_gain > 0.0, "feedback_gain must be > 0");
  require(control_period > 0.0, "control_period must be > 0");
  require(init_lengthscale > 0.0 && lengthscale_min > 0.0 &&
              lengthscale_min <= lengthscale_max,
          "lengthscale bounds must satisfy 0 < min <= max");
  require(noise_ratio_min > 0.0, "noise_ratio_min must be > 0");
  require(max_training_points >= 2, "max_training_points must be >= 2");
  require(train_iterations >= 0, "train_iterations must be >= 0");
}

#define ILOSA_CONFIG_FIELDS(X)                                        \
  X(attractor_limit) X(stiffness_mean) X(stiffness_min) X(stiffness_max) \
  X(max_stabilization_force) X(uncertainty_threshold) X(append_threshold) \
  X(feedback_gain) X(control_period) X(stabilization) X(bounded_attractor) \
  X(init_lengthscale) X(lengthscale_min) X(lengthscale_max)            \
  X(noise_ratio_min) X(max_training_points) X(train_iterations)

json to_json(const PolicyConfig& c) {
  json j;
#define X(name) j[#name] = c.name;
  ILOSA_CONFIG_FIELDS(X)
#undef X
  return j;
}

PolicyConfig config_from_json(const json& doc, const PolicyConfig& base) {
  if (!doc.is_object()) throw InvalidArgument("policy config must be an object");
  PolicyConfig c = base;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool known = false;
    try {
#define X(name)                                      \
  if (it.key() == #name) {                            \
    c.name = it.value().get<decltype(c.name)>();      \
    known = true;                                     \
  }
      ILOSA_CONFIG_FIELDS(X)
#undef X
    } catch (const json::exception& e) {
      throw InvalidArgument("policy config: bad value for '" + it.key() + "'");
    }
    if (!known) {
      throw InvalidArgument("policy config: unknown key '" + it.key() + "'");
    }
  }
  c.validate();
  return c;
}

}  // namespace ilosa::policy
