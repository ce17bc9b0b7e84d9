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

#include <nlohmann/json.hpp>

#include "ilosa/common.hpp"
#include "ilosa/policy/policy.hpp"
#include "ilosa/sim/environment.hpp"

namespace ilosa::sim {

struct SimParams {
  Vec3 mass = Vec3::Constant(1.5);  // diagonal inertia, kg
  double damping_floor = 2.0;       // N s/m, applied per axis
  double dt = 1e-3;                 // s
  int substeps = 10;                // physics steps per control period
  double friction_velocity = 1e-3;  // m/s, friction regularization

  void validate() const;
};

nlohmann::json to_json(const SimParams& params);
// Missing keys keep the values of `base`; unknown keys are rejected.
SimParams sim_params_from_json(const nlohmann::json& doc, const SimParams& base = {});

struct ContactState {
  bool plug_released = false;
  double release_time = std::numeric_limits<double>::quiet_NaN();
  double box_face = std::numeric_limits<double>::quiet_NaN();  // along push dir
  bool box_removed = false;
  bool in_contact = false;
  double normal_force = 0.0;  // board normal or box/plug contact magnitude, N
  Vec3 env_force = Vec3::Zero();  // force exerted at the start of last step
};

struct SimState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double time = 0.0;
  ContactState contact;
};

// Initial state at rest; sets up environment-specific contact bookkeeping.
SimState initial_state(const Environment& env, const Vec3& position);

// D_i = 2 sqrt(mass_i K_i).
Vec3 critical_damping(const Vec3& mass, const Vec3& stiffness);

// Environment force with its Jacobians: stiffness = -df/dx, damping = -df/dv.
struct EnvResponse {
  Vec3 force = Vec3::Zero();
  Mat3 stiffness = Mat3::Zero();
  Mat3 damping = Mat3::Zero();
  double normal_force = 0.0;
  bool in_contact = false;
};
EnvResponse env_response(const Environment& env, const SimState& state,
                         double friction_velocity = 1e-3);
Vec3 env_force(const Environment& env, const SimState& state);

// One physics step of the impedance-controlled point mass toward the
// absolute attractor cmd.attractor() with damping max(2 sqrt(mK), floor).
// Trapezoidal (implicit midpoint) rule with the environment linearized about
// the current state. Throws SimulationDiverged on a non-finite result.
SimState step(const SimState& state, const policy::ControlCommand& cmd,
              const Environment& env, const Vec3& perturbation, double dt,
              const SimParams& params = {});

// Mechanical energy of the point mass relative to the attractor.
double mechanical_energy(const SimState& state, const Vec3& attractor,
                         const Vec3& stiffness, const Vec3& mass);

}  // namespace ilosa::sim
