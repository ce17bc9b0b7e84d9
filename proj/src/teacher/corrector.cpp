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

#include "ilosa/teacher/corrector.hpp"

#include <cmath>

namespace ilosa::teacher {

using nlohmann::json;

void CorrectorConfig::validate() const {
  if (period_ticks < 1) throw InvalidArgument("corrector period_ticks must be >= 1");
  if (!(dead_band >= 0.0) || !(error_scale > 0.0) || !(speed_scale > 0.0) ||
      !(teach_speed >= 0.0) || !(speed_dead_band >= 0.0) || !(goal_slowdown > 0.0) ||
      !(goal_tolerance > 0.0) || !(goal_speed > 0.0) || !(lookahead > 0.0) ||
      !(lookback >= 0.0) || !(target_force >= 0.0) || !(force_scale > 0.0)) {
    throw InvalidArgument("corrector parameters out of range");
  }
  if (target_force > 0.0 && std::abs(force_direction.norm() - 1.0) > 1e-9) {
    throw InvalidArgument("corrector force_direction must be a unit vector");
  }
}

#define ILOSA_CORRECTOR_FIELDS(X)                                         \
  X(period_ticks) X(dead_band) X(error_scale) X(teach_speed)              \
  X(speed_dead_band) X(speed_scale) X(goal_slowdown) X(approach_distance) \
  X(goal_tolerance) X(goal_speed) X(mark_goal) X(min_component)           \
  X(lookahead) X(lookback) X(target_force) X(force_band) X(force_scale)

json to_json(const CorrectorConfig& c) {
  json doc;
#define X(name) doc[#name] = c.name;
  ILOSA_CORRECTOR_FIELDS(X)
#undef X
  doc["force_direction"] = {c.force_direction.x(), c.force_direction.y(),
                            c.force_direction.z()};
  doc["active_until"] = std::isfinite(c.active_until) ? json(c.active_until) : json(nullptr);
  return doc;
}

CorrectorConfig corrector_config_from_json(const json& doc, const CorrectorConfig& base) {
  CorrectorConfig c = base;
  try {
    for (const auto& [key, value] : doc.items()) {
      bool known = false;
#define X(name)                                          \
  if (key == #name) {                                    \
    c.name = value.get<decltype(c.name)>();              \
    known = true;                                        \
  }
      ILOSA_CORRECTOR_FIELDS(X)
#undef X
      if (key == "force_direction") {
        const auto v = value.get<std::vector<double>>();
        if (v.size() != 3) throw InvalidArgument("force_direction needs 3 entries");
        c.force_direction = Vec3(v[0], v[1], v[2]);
        known = true;
      }
      if (key == "active_until") {
        c.active_until = value.is_null() ? std::numeric_limits<double>::infinity()
                                         : value.get<double>();
        known = true;
      }
      if (!known) throw InvalidArgument("unknown corrector key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed corrector config: ") + e.what());
  }
  c.validate();
  return c;
}

#undef ILOSA_CORRECTOR_FIELDS

ScriptedCorrector::ScriptedCorrector(ReferencePath reference, const Vec3& goal,
                                     bool cyclic, CorrectorConfig config)
    : reference_(std::move(reference)), goal_(goal), cyclic_(cyclic),
      config_(std::move(config)) {
  config_.validate();
}

int ScriptedCorrector::laps() const {
  return static_cast<int>(std::floor(progress_ / reference_.length()));
}

std::optional<policy::FeedbackEvent> ScriptedCorrector::observe(
    long tick, const sim::SimState& state) {
  const Vec3& x = state.position;
  progress_ = reference_.project(x, progress_ - config_.lookback,
                                 progress_ + config_.lookahead);
  if (!cyclic_) progress_ = std::min(progress_, reference_.length());

  if (goal_marked_ || state.time > config_.active_until) return std::nullopt;
  if (tick - last_emit_ < config_.period_ticks) return std::nullopt;

  const double remaining = cyclic_ ? std::numeric_limits<double>::infinity()
                                   : reference_.length() - progress_;
  const double speed = state.velocity.norm();

  if (!cyclic_ && config_.mark_goal && (x - goal_).norm() < config_.goal_tolerance &&
      speed < config_.goal_speed) {
    goal_marked_ = true;
    last_emit_ = tick;
    policy::FeedbackEvent ev;
    ev.goal_flag = true;
    ev.timestamp = state.time;
    return ev;
  }

  const Vec3 tangent = reference_.tangent_at(progress_);
  Vec3 u = Vec3::Zero();
  const bool approach = remaining < config_.approach_distance;
  if (approach) {
    const Vec3 e = goal_ - x;
    if (e.norm() > config_.dead_band) u += e / config_.error_scale;
  } else {
    Vec3 e = reference_.point_at(progress_) - x;
    e -= e.dot(tangent) * tangent;
    if (config_.target_force > 0.0) {
      e -= e.dot(config_.force_direction) * config_.force_direction;
    }
    if (e.norm() > config_.dead_band) u += e / config_.error_scale;
  }

  const double wanted = std::min(config_.teach_speed, config_.goal_slowdown * remaining);
  const double along = state.velocity.dot(tangent);
  const double deficit = wanted - along;
  // On the final approach only braking is left to the speed term.
  if (std::abs(deficit) > config_.speed_dead_band && (!approach || deficit < 0.0)) {
    u += tangent * deficit / config_.speed_scale;
  }

  if (config_.target_force > 0.0 &&
      state.contact.normal_force < config_.target_force - config_.force_band) {
    const double short_by = config_.target_force - state.contact.normal_force;
    u += config_.force_direction * std::min(1.0, short_by / config_.force_scale);
  }

  for (int d = 0; d < 3; ++d) {
    u[d] = std::clamp(u[d], -1.0, 1.0);
    if (std::abs(u[d]) < config_.min_component) u[d] = 0.0;
  }
  if (u.isZero(0.0)) return std::nullopt;
  last_emit_ = tick;
  policy::FeedbackEvent ev;
  ev.increment = u;
  ev.timestamp = state.time;
  return ev;
}

}  // namespace ilosa::teacher
