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

#include <string>

#include <nlohmann/json.hpp>

#include "ilosa/service/session.hpp"

namespace ilosa::service {

inline constexpr const char* kProtocolVersion = "1";

nlohmann::json to_json(const TickBroadcast& state);
nlohmann::json to_json(const FeedbackAck& ack);
nlohmann::json to_json(const DemoSummary& summary);
nlohmann::json to_json(const DatabaseSizes& sizes);

// {"increment": [ux, uy, uz], "goal_flag": bool, "timestamp": s}; every key
// is optional. Components outside [-1, 1] are rejected, not clamped.
policy::FeedbackEvent feedback_from_json(const nlohmann::json& doc);

// Envelope every message carries: {"protocol_version": "1", "type": type}.
nlohmann::json message(const std::string& type, nlohmann::json body = nlohmann::json::object());
nlohmann::json error_message(const std::string& code, const std::string& detail);

// Plain request/response surface shared by the HTTP server and tests.
struct ApiRequest {
  std::string method;  // GET, POST, PUT, DELETE
  std::string path;    // without query string
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class Api {
 public:
  explicit Api(SessionManager& sessions) : sessions_(sessions) {}

  ApiResponse handle(const ApiRequest& request);
  // One client message received on a session's socket; returns the reply.
  nlohmann::json handle_socket_message(Session& session, const std::string& text);

  SessionManager& sessions() { return sessions_; }

 private:
  SessionManager& sessions_;
};

}  // namespace ilosa::service
