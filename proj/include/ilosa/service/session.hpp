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

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ilosa/policy/field.hpp"
#include "ilosa/policy/policy.hpp"
#include "ilosa/sim/simulator.hpp"
#include "ilosa/teacher/episode.hpp"

namespace ilosa::service {

enum class LoopStatus { kIdle, kDemoRecording, kRunning, kPaused };

const char* to_string(LoopStatus status);

// Request that is well formed but not allowed in the current loop status.
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SessionConfig {
  policy::PolicyConfig policy;
  sim::Environment env;
  sim::SimParams sim;
  Vec3 start = Vec3::Zero();
  // Ticks kept for the downloadable log; older ticks are dropped.
  long max_log_ticks = 360000;

  void validate() const;
};

nlohmann::json to_json(const SessionConfig& config);
SessionConfig session_config_from_json(const nlohmann::json& doc,
                                       const SessionConfig& base = {});

struct TickBroadcast {
  long tick = 0;
  double time = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  policy::ControlCommand command;
  Vec3 env_force = Vec3::Zero();
  double normal_force = 0.0;
  long database_size = 0;
};

struct DatabaseSizes {
  long attractor = 0;
  std::array<long, 3> stiffness{0, 0, 0};
};

struct FeedbackAck {
  long sequence = 0;  // per session, starting at 1
  long tick = 0;
  double time = 0.0;
  Vec3 position = Vec3::Zero();
  bool goal = false;
  policy::FeedbackBranch applied_as = policy::FeedbackBranch::kCorrect;
  DatabaseSizes before;
  DatabaseSizes after;
};

struct DemoSummary {
  int demos = 0;
  long samples = 0;  // in the demo just closed
  long inputs = 0;   // policy size after training
};

struct TickResult {
  std::optional<TickBroadcast> state;  // absent unless the session is running
  std::optional<std::string> error;    // set when the simulation diverged
};

// One live teaching loop. Every method takes the session lock, so the
// control tick, feedback, and snapshots never interleave.
class Session {
 public:
  Session(std::string id, SessionConfig config);

  const std::string& id() const { return id_; }
  LoopStatus status() const;
  nlohmann::json describe() const;

  void begin_demo();
  void add_demo_sample(double t, const Vec3& position);
  DemoSummary end_demo();

  // idle -> running restarts the simulation at the configured start;
  // paused -> running resumes.
  void start();
  void pause();
  void stop();

  // Advances one control period when running.
  TickResult tick();
  // Applies a device event at the current end-effector position.
  FeedbackAck submit_feedback(const policy::FeedbackEvent& event);

  policy::FieldGrid field_snapshot(const policy::FieldSpec& spec) const;
  nlohmann::json export_policy() const;
  void import_policy(const nlohmann::json& doc);
  std::string log_csv() const;
  teacher::EpisodeLog episode_log() const;

 private:
  DatabaseSizes sizes() const;
  void reset_simulation();

  std::string id_;
  SessionConfig config_;
  mutable std::mutex mutex_;
  LoopStatus status_ = LoopStatus::kIdle;
  policy::PolicyState policy_;
  std::vector<policy::TimedTrajectory> demos_;
  policy::TimedTrajectory recording_;
  sim::SimState state_;
  long tick_ = 0;
  long feedback_sequence_ = 0;
  std::optional<std::string> last_error_;
  std::vector<teacher::TickRecord> ticks_;
  std::vector<teacher::FeedbackRecord> feedback_;
  int pending_feedback_ = 0;  // feedback kind for the next recorded tick
  int pending_branch_ = -1;
};

class SessionManager {
 public:
  explicit SessionManager(SessionConfig defaults = {}) : defaults_(std::move(defaults)) {}

  // `overrides` is merged over the defaults; throws InvalidArgument.
  std::shared_ptr<Session> create(const nlohmann::json& overrides = nlohmann::json::object());
  std::shared_ptr<Session> find(const std::string& id) const;
  bool remove(const std::string& id);
  std::vector<std::shared_ptr<Session>> sessions() const;

 private:
  SessionConfig defaults_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  long next_ = 1;
};

}  // namespace ilosa::service
