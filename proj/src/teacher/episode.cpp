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

#include "ilosa/teacher/episode.hpp"

#include <cmath>

namespace ilosa::teacher {

void EpisodeOptions::validate() const {
  sim.validate();
  if (!(duration > 0.0)) throw InvalidArgument("episode duration must be > 0");
  if (std::abs(sim.dt * sim.substeps - control_period) > 1e-12) {
    throw InvalidArgument("control period must equal dt * substeps");
  }
  if (perturbation) perturbation->validate();
}

EpisodeLog run_episode(const policy::PolicyState& initial, const sim::Environment& env,
                       const Vec3& start, ScriptedCorrector* corrector,
                       const EpisodeOptions& options) {
  options.validate();
  env.validate();
  if (initial.empty()) throw InvalidArgument("run_episode: policy not initialized");

  EpisodeLog log;
  log.policy = initial;
  log.control_period = options.control_period;
  sim::SimState state = sim::initial_state(env, start);
  sim::PerturbationState pert;
  if (options.perturbation) pert = sim::make_perturbation_state(*options.perturbation);
  auto perturbation_at = [&](double t) -> Vec3 {
    return options.perturbation ? sim::sample_perturbation(*options.perturbation, t, pert)
                                : Vec3::Zero();
  };

  double goal_time = -1.0;
  const long ticks = std::lround(options.duration / options.control_period);
  if (options.record_ticks) log.ticks.reserve(static_cast<size_t>(ticks));
  for (long tick = 0; tick < ticks; ++tick) {
    TickRecord rec;
    rec.time = state.time;
    rec.position = state.position;
    rec.velocity = state.velocity;
    rec.env_force = state.contact.env_force;
    rec.normal_force = state.contact.normal_force;

    if (corrector) {
      if (auto ev = corrector->observe(tick, state)) {
        FeedbackRecord fr;
        fr.tick = tick;
        fr.time = state.time;
        fr.position = state.position;
        fr.event = *ev;
        fr.size_before = log.policy.size();
        policy::FeedbackOutcome out =
            ev->goal_flag ? policy::mark_goal(log.policy, state.position)
                          : policy::apply_feedback(log.policy, state.position, *ev);
        log.policy = std::move(out.policy);
        fr.branch = out.branch;
        fr.size_after = log.policy.size();
        rec.feedback = ev->goal_flag ? 2 : 1;
        rec.branch = out.branch == policy::FeedbackBranch::kAppend ? 1 : 0;
        log.feedback.push_back(fr);
      }
    }
    rec.command = policy::query(log.policy, state.position);
    rec.database_size = log.policy.size();
    rec.perturbation = perturbation_at(state.time);
    if (env.obstacle && env.obstacle->contains(state.position)) ++log.obstacle_ticks;
    if (options.record_ticks) log.ticks.push_back(rec);

    try {
      for (int s = 0; s < options.sim.substeps; ++s) {
        state = sim::step(state, rec.command, env, perturbation_at(state.time),
                          options.sim.dt, options.sim);
      }
    } catch (const SimulationDiverged& e) {
      log.final_state = state;
      throw EpisodeDiverged(e.what(), std::move(log));
    }
    if (options.workspace && !options.workspace->contains(state.position)) {
      log.left_workspace = true;
      break;
    }
    if (corrector) {
      if (corrector->goal_marked()) {
        if (goal_time < 0.0) goal_time = state.time;
        if (state.time - goal_time >= options.stop_after_goal) break;
      }
      if (options.stop_after_laps > 0 && corrector->laps() >= options.stop_after_laps) break;
    }
  }
  log.final_state = state;
  log.plug_released = state.contact.plug_released;
  if (log.plug_released) log.release_time = state.contact.release_time;
  return log;
}

}  // namespace ilosa::teacher
