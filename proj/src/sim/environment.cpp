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

#include "ilosa/sim/environment.hpp"

#include <cmath>

namespace ilosa::sim {

using nlohmann::json;

namespace {

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

void read_vec(const json& doc, const char* key, Vec3& out) {
  if (!doc.contains(key)) return;
  const auto v = doc.at(key).get<std::vector<double>>();
  if (v.size() != 3) throw InvalidArgument(std::string(key) + " must have 3 entries");
  out = Vec3(v[0], v[1], v[2]);
}

void read_num(const json& doc, const char* key, double& out) {
  if (doc.contains(key)) {
    // null encodes infinity (JSON has no literal for it)
    out = doc.at(key).is_null() ? std::numeric_limits<double>::infinity()
                                : doc.at(key).get<double>();
  }
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void require_unit(const Vec3& v, const char* what) {
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > 1e-9) {
    throw InvalidArgument(std::string(what) + " must be a unit vector");
  }
}

}  // namespace

const char* to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::kPlug: return "plug";
    case EnvKind::kBox: return "box";
    case EnvKind::kWhiteboard: return "whiteboard";
    default: return "free";
  }
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "free") return EnvKind::kFree;
  if (name == "plug") return EnvKind::kPlug;
  if (name == "box") return EnvKind::kBox;
  if (name == "whiteboard") return EnvKind::kWhiteboard;
  throw InvalidArgument("unknown environment kind '" + name + "'");
}

void Environment::validate() const {
  if (!(plug.breakaway_force >= 0.0) || !(plug.hold_stiffness >= 0.0) ||
      !(box.friction_force >= 0.0) || !(box.viscous_friction >= 0.0) || !(box.face_stiffness > 0.0) ||
      !(board.normal_stiffness >= 0.0) || !(board.friction_coefficient >= 0.0)) {
    throw InvalidArgument("environment force parameters must be >= 0");
  }
  if (kind == EnvKind::kPlug) require_unit(plug.pull_direction, "plug.pull_direction");
  if (kind == EnvKind::kBox) require_unit(box.push_direction, "box.push_direction");
  if (kind == EnvKind::kWhiteboard) require_unit(board.normal, "board.normal");
  if (obstacle && !(obstacle->upper.array() >= obstacle->lower.array()).all()) {
    throw InvalidArgument("obstacle upper corner below lower corner");
  }
}

json to_json(const Environment& env) {
  json doc;
  doc["kind"] = to_string(env.kind);
  doc["plug"] = {{"socket", vec(env.plug.socket)},
                 {"pull_direction", vec(env.plug.pull_direction)},
                 {"breakaway_force", env.plug.breakaway_force},
                 {"hold_stiffness", env.plug.hold_stiffness}};
  doc["box"] = {{"face_point", vec(env.box.face_point)},
                {"push_direction", vec(env.box.push_direction)},
                {"friction_force", env.box.friction_force},
                {"viscous_friction", env.box.viscous_friction},
                {"face_stiffness", env.box.face_stiffness},
                {"removal_time", num(env.box.removal_time)}};
  doc["board"] = {{"plane_point", vec(env.board.plane_point)},
                  {"normal", vec(env.board.normal)},
                  {"normal_stiffness", env.board.normal_stiffness},
                  {"friction_coefficient", env.board.friction_coefficient}};
  if (env.obstacle) {
    doc["obstacle"] = {{"lower", vec(env.obstacle->lower)},
                       {"upper", vec(env.obstacle->upper)}};
  } else {
    doc["obstacle"] = nullptr;
  }
  return doc;
}

Environment environment_from_json(const json& doc, const Environment& base) {
  Environment env = base;
  try {
    if (doc.contains("kind")) env.kind = env_kind_from_string(doc.at("kind").get<std::string>());
    if (doc.contains("plug")) {
      const json& p = doc.at("plug");
      read_vec(p, "socket", env.plug.socket);
      read_vec(p, "pull_direction", env.plug.pull_direction);
      read_num(p, "breakaway_force", env.plug.breakaway_force);
      read_num(p, "hold_stiffness", env.plug.hold_stiffness);
    }
    if (doc.contains("box")) {
      const json& b = doc.at("box");
      read_vec(b, "face_point", env.box.face_point);
      read_vec(b, "push_direction", env.box.push_direction);
      read_num(b, "friction_force", env.box.friction_force);
      read_num(b, "viscous_friction", env.box.viscous_friction);
      read_num(b, "face_stiffness", env.box.face_stiffness);
      read_num(b, "removal_time", env.box.removal_time);
    }
    if (doc.contains("board")) {
      const json& b = doc.at("board");
      read_vec(b, "plane_point", env.board.plane_point);
      read_vec(b, "normal", env.board.normal);
      read_num(b, "normal_stiffness", env.board.normal_stiffness);
      read_num(b, "friction_coefficient", env.board.friction_coefficient);
    }
    if (doc.contains("obstacle")) {
      if (doc.at("obstacle").is_null()) {
        env.obstacle.reset();
      } else {
        AxisBox box;
        read_vec(doc.at("obstacle"), "lower", box.lower);
        read_vec(doc.at("obstacle"), "upper", box.upper);
        env.obstacle = box;
      }
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed environment: ") + e.what());
  }
  env.validate();
  return env;
}

}  // namespace ilosa::sim
