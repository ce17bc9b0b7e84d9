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

#include "ilosa/sim/simulator.hpp"

#include <cmath>

#include <Eigen/LU>

namespace ilosa::sim {

void SimParams::validate() const {
  if (!(mass.array() > 0.0).all()) throw InvalidArgument("mass must be > 0");
  if (!(damping_floor >= 0.0)) throw InvalidArgument("damping_floor must be >= 0");
  if (!(dt > 0.0 && dt <= 0.05)) throw InvalidArgument("dt must be in (0, 0.05]");
  if (substeps < 1) throw InvalidArgument("substeps must be >= 1");
  if (!(friction_velocity > 0.0)) throw InvalidArgument("friction_velocity must be > 0");
}

nlohmann::json to_json(const SimParams& p) {
  return {{"mass", {p.mass.x(), p.mass.y(), p.mass.z()}},
          {"damping_floor", p.damping_floor},
          {"dt", p.dt},
          {"substeps", p.substeps},
          {"friction_velocity", p.friction_velocity}};
}

SimParams sim_params_from_json(const nlohmann::json& doc, const SimParams& base) {
  SimParams p = base;
  if (!doc.is_object()) throw InvalidArgument("sim parameters must be an object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "mass") {
        if (value.is_number()) {
          p.mass = Vec3::Constant(value.get<double>());
        } else {
          const auto m = value.get<std::vector<double>>();
          if (m.size() != 3) throw InvalidArgument("sim.mass needs 1 or 3 entries");
          p.mass = Vec3(m[0], m[1], m[2]);
        }
      } else if (key == "damping_floor") {
        p.damping_floor = value.get<double>();
      } else if (key == "dt") {
        p.dt = value.get<double>();
      } else if (key == "substeps") {
        p.substeps = value.get<int>();
      } else if (key == "friction_velocity") {
        p.friction_velocity = value.get<double>();
      } else {
        throw InvalidArgument("unknown sim key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed sim parameters: ") + e.what());
  }
  p.validate();
  return p;
}

SimState initial_state(const Environment& env, const Vec3& position) {
  SimState s;
  s.position = position;
  if (env.kind == EnvKind::kBox) {
    s.contact.box_face = env.box.face_point.dot(env.box.push_direction);
  }
  const EnvResponse r = env_response(env, s);
  s.contact.env_force = r.force;
  s.contact.normal_force = r.normal_force;
  s.contact.in_contact = r.in_contact;
  return s;
}

Vec3 critical_damping(const Vec3& mass, const Vec3& stiffness) {
  return 2.0 * (mass.cwiseProduct(stiffness.cwiseMax(0.0))).cwiseSqrt();
}

EnvResponse env_response(const Environment& env, const SimState& s,
                         double friction_velocity) {
  EnvResponse r;
  switch (env.kind) {
    case EnvKind::kFree:
      break;
    case EnvKind::kPlug: {
      if (s.contact.plug_released) break;
      const double k = env.plug.hold_stiffness;
      r.force = -k * (s.position - env.plug.socket);
      r.stiffness = k * Mat3::Identity();
      r.normal_force = r.force.norm();
      r.in_contact = true;
      break;
    }
    case EnvKind::kBox: {
      if (s.contact.box_removed || s.time >= env.box.removal_time) break;
      const Vec3& n = env.box.push_direction;
      const double pen = s.position.dot(n) - s.contact.box_face;
      if (pen <= 0.0) break;
      const double spring = env.box.face_stiffness * pen;
      const double vn = std::max(0.0, s.velocity.dot(n));
      const double slide = env.box.friction_force + env.box.viscous_friction * vn;
      const double mag = std::min(spring, slide);
      r.force = -mag * n;
      if (spring < slide) {
        r.stiffness = env.box.face_stiffness * n * n.transpose();
      } else if (vn > 0.0) {
        r.damping = env.box.viscous_friction * n * n.transpose();
      }
      r.normal_force = mag;
      r.in_contact = true;
      break;
    }
    case EnvKind::kWhiteboard: {
      const Vec3& n = env.board.normal;
      const double pen = -(s.position - env.board.plane_point).dot(n);
      if (pen <= 0.0) break;
      const double normal = env.board.normal_stiffness * pen;
      const Mat3 tangent = Mat3::Identity() - n * n.transpose();
      const Vec3 vt = tangent * s.velocity;
      const double speed = vt.norm();
      const double mu_n = env.board.friction_coefficient * normal;
      r.force = normal * n;
      r.stiffness = env.board.normal_stiffness * n * n.transpose();
      if (speed < friction_velocity) {
        r.force -= mu_n / friction_velocity * vt;
        r.damping = mu_n / friction_velocity * tangent;
      } else {
        const Vec3 dir = vt / speed;
        r.force -= mu_n * dir;
        r.damping = mu_n / speed * (tangent - dir * dir.transpose());
      }
      r.normal_force = normal;
      r.in_contact = true;
      break;
    }
  }
  return r;
}

Vec3 env_force(const Environment& env, const SimState& state) {
  return env_response(env, state).force;
}

SimState step(const SimState& state, const policy::ControlCommand& cmd,
              const Environment& env, const Vec3& perturbation, double dt,
              const SimParams& params) {
  if (!(dt > 0.0 && dt <= 0.05)) throw InvalidArgument("step: dt must be in (0, 0.05]");
  const EnvResponse r = env_response(env, state, params.friction_velocity);
  const Vec3 k = cmd.stiffness.cwiseMax(0.0);
  const Vec3 d = critical_damping(params.mass, k).cwiseMax(params.damping_floor);
  const Vec3& x0 = state.position;
  const Vec3& v0 = state.velocity;

  const Vec3 f0 = k.cwiseProduct(cmd.attractor() - x0) - d.cwiseProduct(v0) +
                  r.force + perturbation;
  const Mat3 jx = -(Mat3(k.asDiagonal()) + r.stiffness);
  const Mat3 jv = -(Mat3(d.asDiagonal()) + r.damping);
  const Mat3 lhs = Mat3(params.mass.asDiagonal()) - 0.25 * dt * dt * jx - 0.5 * dt * jv;
  const Vec3 rhs = dt * f0 + 0.5 * dt * dt * (jx * v0);
  const Vec3 dv = lhs.partialPivLu().solve(rhs);

  SimState next = state;
  next.velocity = v0 + dv;
  next.position = x0 + 0.5 * dt * (v0 + next.velocity);
  next.time = state.time + dt;
  if (!next.position.allFinite() || !next.velocity.allFinite()) {
    throw SimulationDiverged("non-finite state at t=" + std::to_string(next.time));
  }

  ContactState& c = next.contact;
  if (env.kind == EnvKind::kPlug && !c.plug_released) {
    const double hold = env.plug.hold_stiffness *
                        (next.position - env.plug.socket).dot(env.plug.pull_direction);
    if (hold > env.plug.breakaway_force) {
      c.plug_released = true;
      c.release_time = next.time;
    }
  }
  if (env.kind == EnvKind::kBox && !c.box_removed) {
    if (next.time >= env.box.removal_time) {
      c.box_removed = true;
    } else {
      const double s = next.position.dot(env.box.push_direction);
      const double vn = std::max(0.0, next.velocity.dot(env.box.push_direction));
      const double limit =
          (env.box.friction_force + env.box.viscous_friction * vn) / env.box.face_stiffness;
      if (s - c.box_face > limit) c.box_face = s - limit;  // box slides
    }
  }
  const EnvResponse after = env_response(env, next, params.friction_velocity);
  c.env_force = after.force;
  c.normal_force = after.normal_force;
  c.in_contact = after.in_contact;
  return next;
}

double mechanical_energy(const SimState& s, const Vec3& attractor,
                         const Vec3& stiffness, const Vec3& mass) {
  const Vec3 offset = s.position - attractor;
  return 0.5 * mass.dot(s.velocity.cwiseAbs2()) +
         0.5 * stiffness.dot(offset.cwiseAbs2());
}

}  // namespace ilosa::sim
