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

#include <memory>
#include <string>
#include <vector>

#include "ilosa/service/protocol.hpp"

namespace ilosa::service {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  std::string log_dir;         // session logs are written here on shutdown
  double realtime_factor = 1.0;  // simulated seconds per wall-clock second
  bool handle_signals = false;   // SIGINT / SIGTERM stop run()
};

// HTTP request/response endpoints plus a WebSocket stream per session at
// /sessions/{id}/stream. A single I/O thread owns the sockets and the
// control timer that ticks every running session.
class Server {
 public:
  // Binds immediately; throws std::runtime_error when the address is taken.
  Server(SessionManager& sessions, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  unsigned short port() const;
  // Blocks until stop() is called (from any thread or a signal handler).
  void run();
  void stop();

  // Writes log CSV and policy JSON for every session into log_dir and
  // returns the written paths. No-op without a log_dir.
  std::vector<std::string> flush_logs() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ilosa::service
