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

#include <nlohmann/json.hpp>

#include "ilosa/common.hpp"

namespace ilosa::sim {

enum class EnvKind { kFree, kPlug, kBox, kWhiteboard };

const char* to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

struct AxisBox {
  Vec3 lower = Vec3::Zero();
  Vec3 upper = Vec3::Zero();
  bool contains(const Vec3& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }
};

// Plug held in a socket by a stiff spring until the holding force along the
// pull direction exceeds the breakaway force.
struct PlugParams {
  Vec3 socket = Vec3::Zero();
  Vec3 pull_direction = Vec3::UnitX();
  double breakaway_force = 20.0;     // N
  double hold_stiffness = 2.0e4;     // N/m
};

// A box pushed along push_direction. Its contact face is a stiff spring that
// yields (the box slides) once the contact force reaches friction_force.
struct BoxParams {
  Vec3 face_point = Vec3::Zero();
  Vec3 push_direction = Vec3::UnitX();
  double friction_force = 10.0;   // N, Coulomb part
  double viscous_friction = 0.0;  // N s/m while sliding
  double face_stiffness = 1.0e4;  // N/m
  double removal_time = std::numeric_limits<double>::infinity();  // s
};

// Unilateral plane; normal points away from the board into free space.
struct BoardParams {
  Vec3 plane_point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double normal_stiffness = 5000.0;  // N/m
  double friction_coefficient = 0.2;
};

struct Environment {
  EnvKind kind = EnvKind::kFree;
  PlugParams plug;
  BoxParams box;
  BoardParams board;
  // Region the end-effector must not enter. Exerts no force; episodes count
  // the ticks spent inside it.
  std::optional<AxisBox> obstacle;

  void validate() const;
};

nlohmann::json to_json(const Environment& env);
// Missing keys keep `base` values.
Environment environment_from_json(const nlohmann::json& doc,
                                  const Environment& base = {});

}  // namespace ilosa::sim
