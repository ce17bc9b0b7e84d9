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

#include "ilosa/sim/perturbation.hpp"

#include <cmath>

namespace ilosa::sim {

void PerturbationSpec::validate() const {
  if (!std::isfinite(mean)) throw InvalidArgument("perturbation mean must be finite");
  if (!(stddev >= 0.0)) throw InvalidArgument("perturbation stddev must be >= 0");
  if (!(hold_interval > 0.0)) throw InvalidArgument("perturbation hold_interval must be > 0");
  if (!(end_time >= start_time)) throw InvalidArgument("perturbation window is empty");
}

PerturbationState make_perturbation_state(const PerturbationSpec& spec) {
  PerturbationState s;
  s.rng.seed(spec.seed);
  s.normal = std::normal_distribution<double>(spec.mean, spec.stddev > 0.0 ? spec.stddev : 1.0);
  return s;
}

Vec3 sample_perturbation(const PerturbationSpec& spec, double t,
                         PerturbationState& state) {
  if (t < spec.start_time || t >= spec.end_time) return Vec3::Zero();
  // Small epsilon so t landing on a boundary in floating point still counts.
  const long interval =
      static_cast<long>(std::floor((t - spec.start_time) / spec.hold_interval + 1e-9));
  while (state.interval < interval) {
    for (int d = 0; d < 3; ++d) {
      double v = spec.stddev > 0.0 ? state.normal(state.rng) : spec.mean;
      if (spec.signed_mode && state.coin(state.rng)) v = -v;
      state.value[d] = v;
    }
    ++state.interval;
  }
  return state.value;
}

nlohmann::json to_json(const PerturbationSpec& s) {
  return {{"mean", s.mean},
          {"stddev", s.stddev},
          {"hold_interval", s.hold_interval},
          {"seed", s.seed},
          {"signed", s.signed_mode},
          {"start_time", s.start_time},
          {"end_time", std::isfinite(s.end_time) ? nlohmann::json(s.end_time)
                                                 : nlohmann::json(nullptr)}};
}

PerturbationSpec perturbation_from_json(const nlohmann::json& doc,
                                        const PerturbationSpec& base) {
  PerturbationSpec s = base;
  try {
    s.mean = doc.value("mean", s.mean);
    s.stddev = doc.value("stddev", s.stddev);
    s.hold_interval = doc.value("hold_interval", s.hold_interval);
    s.seed = doc.value("seed", s.seed);
    s.signed_mode = doc.value("signed", s.signed_mode);
    s.start_time = doc.value("start_time", s.start_time);
    if (doc.contains("end_time")) {
      s.end_time = doc.at("end_time").is_null()
                       ? std::numeric_limits<double>::infinity()
                       : doc.at("end_time").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed perturbation: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace ilosa::sim
