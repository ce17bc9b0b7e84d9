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

#include "ilosa/service/session.hpp"

#include <cmath>
#include <sstream>

#include "ilosa/policy/io.hpp"
#include "ilosa/teacher/experiment.hpp"
#include "ilosa/teacher/log_io.hpp"

namespace ilosa::service {

using nlohmann::json;

const char* to_string(LoopStatus s) {
  switch (s) {
    case LoopStatus::kIdle: return "idle";
    case LoopStatus::kDemoRecording: return "demo_recording";
    case LoopStatus::kRunning: return "running";
    case LoopStatus::kPaused: return "paused";
  }
  return "unknown";
}

void SessionConfig::validate() const {
  policy.validate();
  env.validate();
  sim.validate();
  if (std::abs(sim.dt * sim.substeps - policy.control_period) > 1e-12) {
    throw InvalidArgument("control_period must equal sim.dt * sim.substeps");
  }
  if (!start.allFinite()) throw InvalidArgument("start position must be finite");
  if (max_log_ticks < 0) throw InvalidArgument("max_log_ticks must be >= 0");
}

json to_json(const SessionConfig& c) {
  return {{"policy", policy::to_json(c.policy)},
          {"env", sim::to_json(c.env)},
          {"sim", sim::to_json(c.sim)},
          {"start", {c.start.x(), c.start.y(), c.start.z()}},
          {"max_log_ticks", c.max_log_ticks}};
}

SessionConfig session_config_from_json(const json& doc, const SessionConfig& base) {
  if (!doc.is_object()) throw InvalidArgument("session config must be an object");
  SessionConfig c = base;
  try {
    // A preset supplies task defaults; explicit keys below refine them.
    if (doc.contains("preset")) {
      const teacher::PresetSpec p = teacher::default_preset(doc.at("preset").get<std::string>());
      c.policy = p.policy;
      c.env = p.env;
      c.sim = p.sim;
      c.start = p.start;
    }
    for (const auto& [key, value] : doc.items()) {
      if (key == "preset") continue;
      if (key == "policy") {
        c.policy = policy::config_from_json(value, c.policy);
      } else if (key == "env") {
        c.env = sim::environment_from_json(value, c.env);
      } else if (key == "sim") {
        c.sim = sim::sim_params_from_json(value, c.sim);
      } else if (key == "start") {
        const auto v = value.get<std::vector<double>>();
        if (v.size() != 3) throw InvalidArgument("start needs 3 entries");
        c.start = Vec3(v[0], v[1], v[2]);
      } else if (key == "max_log_ticks") {
        c.max_log_ticks = value.get<long>();
      } else {
        throw InvalidArgument("unknown session key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed session config: ") + e.what());
  }
  c.validate();
  return c;
}

Session::Session(std::string id, SessionConfig config)
    : id_(std::move(id)), config_(std::move(config)) {
  config_.validate();
  reset_simulation();
}

void Session::reset_simulation() {
  state_ = sim::initial_state(config_.env, config_.start);
  tick_ = 0;
  ticks_.clear();
  feedback_.clear();
  last_error_.reset();
  pending_feedback_ = 0;
  pending_branch_ = -1;
}

LoopStatus Session::status() const {
  std::lock_guard lock(mutex_);
  return status_;
}

DatabaseSizes Session::sizes() const {
  DatabaseSizes s;
  s.attractor = policy_.attractor.size();
  for (int d = 0; d < 3; ++d) s.stiffness[static_cast<size_t>(d)] = policy_.stiffness[d].size();
  return s;
}

json Session::describe() const {
  std::lock_guard lock(mutex_);
  json doc{{"id", id_},
           {"status", to_string(status_)},
           {"tick", tick_},
           {"time", state_.time},
           {"position", {state_.position.x(), state_.position.y(), state_.position.z()}},
           {"demos", demos_.size()},
           {"recording_samples", recording_.size()},
           {"database_size", policy_.size()},
           {"feedback_events", feedback_sequence_},
           {"config", to_json(config_)}};
  doc["error"] = last_error_ ? json(*last_error_) : json(nullptr);
  return doc;
}

void Session::begin_demo() {
  std::lock_guard lock(mutex_);
  if (status_ != LoopStatus::kIdle) {
    throw StateError(std::string("begin_demo needs an idle session, status is ") +
                     to_string(status_));
  }
  recording_ = {};
  status_ = LoopStatus::kDemoRecording;
}

void Session::add_demo_sample(double t, const Vec3& position) {
  std::lock_guard lock(mutex_);
  if (status_ != LoopStatus::kDemoRecording) throw StateError("no demo is being recorded");
  if (!std::isfinite(t) || !position.allFinite()) {
    throw InvalidArgument("demo sample must be finite");
  }
  if (!recording_.times.empty() && !(t > recording_.times.back())) {
    throw InvalidArgument("demo timestamps must increase");
  }
  recording_.times.push_back(t);
  recording_.positions.push_back(position);
}

DemoSummary Session::end_demo() {
  std::lock_guard lock(mutex_);
  if (status_ != LoopStatus::kDemoRecording) throw StateError("no demo is being recorded");
  if (recording_.size() < 2) throw InvalidArgument("a demo needs at least 2 samples");
  std::vector<policy::TimedTrajectory> all = demos_;
  all.push_back(recording_);
  policy::PolicyState trained = policy::init_from_demos(all, config_.policy);
  DemoSummary s;
  s.samples = static_cast<long>(recording_.size());
  demos_ = std::move(all);
  policy_ = std::move(trained);
  recording_ = {};
  status_ = LoopStatus::kIdle;
  s.demos = static_cast<int>(demos_.size());
  s.inputs = policy_.size();
  return s;
}

void Session::start() {
  std::lock_guard lock(mutex_);
  if (status_ == LoopStatus::kRunning) return;
  if (status_ == LoopStatus::kDemoRecording) throw StateError("finish the demo first");
  if (policy_.empty()) throw StateError("the session has no trained policy");
  if (status_ == LoopStatus::kIdle) reset_simulation();
  last_error_.reset();
  status_ = LoopStatus::kRunning;
}

void Session::pause() {
  std::lock_guard lock(mutex_);
  if (status_ != LoopStatus::kRunning) {
    throw StateError(std::string("pause needs a running session, status is ") +
                     to_string(status_));
  }
  status_ = LoopStatus::kPaused;
}

void Session::stop() {
  std::lock_guard lock(mutex_);
  if (status_ != LoopStatus::kRunning && status_ != LoopStatus::kPaused) {
    throw StateError(std::string("stop needs a running or paused session, status is ") +
                     to_string(status_));
  }
  status_ = LoopStatus::kIdle;
}

TickResult Session::tick() {
  std::lock_guard lock(mutex_);
  TickResult result;
  if (status_ != LoopStatus::kRunning) return result;

  teacher::TickRecord rec;
  rec.time = state_.time;
  rec.position = state_.position;
  rec.velocity = state_.velocity;
  rec.env_force = state_.contact.env_force;
  rec.normal_force = state_.contact.normal_force;
  rec.feedback = pending_feedback_;
  rec.branch = pending_branch_;
  rec.command = policy::query(policy_, state_.position);
  rec.database_size = policy_.size();

  sim::SimState next = state_;
  try {
    for (int s = 0; s < config_.sim.substeps; ++s) {
      next = sim::step(next, rec.command, config_.env, Vec3::Zero(), config_.sim.dt,
                       config_.sim);
    }
  } catch (const SimulationDiverged& e) {
    status_ = LoopStatus::kPaused;
    last_error_ = e.what();
    result.error = e.what();
    return result;
  }
  pending_feedback_ = 0;
  pending_branch_ = -1;
  ++tick_;
  // Simulated time is counted in whole control periods.
  next.time = static_cast<double>(tick_) * config_.policy.control_period;
  state_ = next;
  if (config_.max_log_ticks > 0) {
    if (static_cast<long>(ticks_.size()) >= config_.max_log_ticks) {
      ticks_.erase(ticks_.begin(), ticks_.begin() + static_cast<long>(ticks_.size() / 2));
    }
    ticks_.push_back(rec);
  }

  TickBroadcast b;
  b.tick = tick_;
  b.time = state_.time;
  b.position = state_.position;
  b.velocity = state_.velocity;
  b.command = rec.command;
  b.env_force = state_.contact.env_force;
  b.normal_force = state_.contact.normal_force;
  b.database_size = policy_.size();
  result.state = b;
  return result;
}

FeedbackAck Session::submit_feedback(const policy::FeedbackEvent& event) {
  std::lock_guard lock(mutex_);
  if (status_ != LoopStatus::kRunning && status_ != LoopStatus::kPaused) {
    throw StateError(std::string("feedback needs a running or paused session, status is ") +
                     to_string(status_));
  }
  event.validate();
  FeedbackAck ack;
  ack.before = sizes();
  const policy::FeedbackOutcome out =
      event.goal_flag ? policy::mark_goal(policy_, state_.position)
                      : policy::apply_feedback(policy_, state_.position, event);
  policy_ = out.policy;
  ack.sequence = ++feedback_sequence_;
  ack.tick = tick_;
  ack.time = state_.time;
  ack.position = state_.position;
  ack.goal = event.goal_flag;
  ack.applied_as = out.branch;
  ack.after = sizes();

  teacher::FeedbackRecord fr;
  fr.tick = tick_;
  fr.time = state_.time;
  fr.position = state_.position;
  fr.event = event;
  fr.branch = out.branch;
  fr.size_before = ack.before.attractor;
  fr.size_after = ack.after.attractor;
  feedback_.push_back(fr);
  pending_feedback_ = event.goal_flag ? 2 : 1;
  pending_branch_ = out.branch == policy::FeedbackBranch::kAppend ? 1 : 0;
  return ack;
}

policy::FieldGrid Session::field_snapshot(const policy::FieldSpec& spec) const {
  spec.validate();
  std::lock_guard lock(mutex_);
  if (policy_.empty()) throw StateError("the session has no trained policy");
  return policy::evaluate_field(policy_, spec);
}

json Session::export_policy() const {
  std::lock_guard lock(mutex_);
  if (policy_.empty()) throw StateError("the session has no trained policy");
  return policy::to_json(policy_);
}

void Session::import_policy(const json& doc) {
  policy::PolicyState p = policy::policy_from_json(doc);
  std::lock_guard lock(mutex_);
  if (status_ == LoopStatus::kRunning || status_ == LoopStatus::kDemoRecording) {
    throw StateError(std::string("policy import needs an idle or paused session, status is ") +
                     to_string(status_));
  }
  if (std::abs(p.config.control_period - config_.policy.control_period) > 1e-12) {
    throw InvalidArgument("imported policy control_period differs from the session");
  }
  policy_ = std::move(p);
  config_.policy = policy_.config;
}

std::string Session::log_csv() const {
  std::lock_guard lock(mutex_);
  std::ostringstream out;
  teacher::write_log_csv(ticks_, out);
  return out.str();
}

teacher::EpisodeLog Session::episode_log() const {
  std::lock_guard lock(mutex_);
  teacher::EpisodeLog log;
  log.ticks = ticks_;
  log.feedback = feedback_;
  log.policy = policy_;
  log.final_state = state_;
  log.control_period = config_.policy.control_period;
  log.plug_released = state_.contact.plug_released;
  if (log.plug_released) log.release_time = state_.contact.release_time;
  return log;
}

std::shared_ptr<Session> SessionManager::create(const json& overrides) {
  SessionConfig config = session_config_from_json(overrides, defaults_);
  std::lock_guard lock(mutex_);
  std::ostringstream id;
  id << "s" << std::hex << (0x5e55'0000L + next_++);
  auto session = std::make_shared<Session>(id.str(), std::move(config));
  sessions_[session->id()] = session;
  return session;
}

std::shared_ptr<Session> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

bool SessionManager::remove(const std::string& id) {
  std::lock_guard lock(mutex_);
  return sessions_.erase(id) > 0;
}

std::vector<std::shared_ptr<Session>> SessionManager::sessions() const {
  std::lock_guard lock(mutex_);
  std::vector<std::shared_ptr<Session>> out;
  for (const auto& [id, s] : sessions_) out.push_back(s);
  return out;
}

}  // namespace ilosa::service
