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

#include "ilosa/service/protocol.hpp"

#include <vector>

#include "ilosa/policy/field.hpp"

namespace ilosa::service {

using nlohmann::json;

namespace {

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& doc, const char* what) {
  const auto v = doc.get<std::vector<double>>();
  if (v.size() != 3) throw InvalidArgument(std::string(what) + " needs 3 entries");
  return Vec3(v[0], v[1], v[2]);
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("request body is not JSON: ") + e.what());
  }
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

ApiResponse reply(int status, const json& doc) {
  ApiResponse r;
  r.status = status;
  r.body = doc.dump();
  return r;
}

ApiResponse fail(int status, const std::string& code, const std::string& detail) {
  return reply(status, error_message(code, detail));
}

void add_samples(Session& s, const json& body) {
  auto one = [&](const json& sample) {
    s.add_demo_sample(sample.at("t").get<double>(), vec_from(sample.at("position"), "position"));
  };
  try {
    if (body.contains("samples")) {
      for (const json& sample : body.at("samples")) one(sample);
    } else {
      one(body);
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed demo sample: ") + e.what());
  }
}

}  // namespace

json to_json(const DatabaseSizes& s) {
  return {{"attractor", s.attractor}, {"stiffness", s.stiffness}};
}

json to_json(const TickBroadcast& b) {
  return message("state", {{"tick", b.tick},
                           {"time", b.time},
                           {"x", vec(b.position)},
                           {"v", vec(b.velocity)},
                           {"dx", vec(b.command.attractor_displacement)},
                           {"k", vec(b.command.stiffness)},
                           {"sigma_rel", b.command.variance_rel},
                           {"f_stable", vec(b.command.stabilization_force)},
                           {"env_force", vec(b.env_force)},
                           {"normal_force", b.normal_force},
                           {"db_size", b.database_size}});
}

json to_json(const FeedbackAck& a) {
  return message("ack", {{"sequence", a.sequence},
                         {"tick", a.tick},
                         {"time", a.time},
                         {"x", vec(a.position)},
                         {"goal", a.goal},
                         {"applied_as", policy::to_string(a.applied_as)},
                         {"db_sizes", to_json(a.after)},
                         {"db_sizes_before", to_json(a.before)}});
}

json to_json(const DemoSummary& s) {
  return message("demo", {{"demos", s.demos}, {"samples", s.samples}, {"inputs", s.inputs}});
}

policy::FeedbackEvent feedback_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidArgument("feedback must be an object");
  policy::FeedbackEvent ev;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "increment") {
        ev.increment = vec_from(value, "increment");
      } else if (key == "goal_flag") {
        ev.goal_flag = value.get<bool>();
      } else if (key == "timestamp") {
        ev.timestamp = value.get<double>();
      } else if (key != "type" && key != "protocol_version") {
        throw InvalidArgument("unknown feedback key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed feedback: ") + e.what());
  }
  ev.validate();
  return ev;
}

json message(const std::string& type, json body) {
  body["protocol_version"] = kProtocolVersion;
  body["type"] = type;
  return body;
}

json error_message(const std::string& code, const std::string& detail) {
  return message("error", {{"code", code}, {"detail", detail}});
}

ApiResponse Api::handle(const ApiRequest& req) {
  const std::vector<std::string> p = split_path(req.path);
  const std::string& m = req.method;
  try {
    if (p.size() == 1 && p[0] == "health") {
      if (m != "GET") return fail(405, "method_not_allowed", m + " " + req.path);
      return reply(200, message("health", {{"status", "ok"},
                                           {"sessions", sessions_.sessions().size()}}));
    }
    if (p.empty() || p[0] != "sessions") return fail(404, "not_found", req.path);
    if (p.size() == 1) {
      if (m == "GET") {
        json list = json::array();
        for (const auto& s : sessions_.sessions()) list.push_back(s->describe());
        return reply(200, message("sessions", {{"sessions", list}}));
      }
      if (m == "POST") {
        auto s = sessions_.create(parse_body(req.body));
        return reply(201, message("session", s->describe()));
      }
      return fail(405, "method_not_allowed", m + " " + req.path);
    }
    const std::shared_ptr<Session> s = sessions_.find(p[1]);
    if (!s) return fail(404, "unknown_session", p[1]);
    const std::string action = p.size() >= 3 ? p[2] : "";
    const std::string sub = p.size() >= 4 ? p[3] : "";
    if (p.size() > 4 || (p.size() == 4 && action != "demo")) {
      return fail(404, "not_found", req.path);
    }

    if (action.empty()) {
      if (m == "GET") return reply(200, message("session", s->describe()));
      if (m == "DELETE") {
        sessions_.remove(s->id());
        return reply(200, message("deleted", {{"id", s->id()}}));
      }
    } else if (m == "POST" && (action == "start" || action == "pause" || action == "stop")) {
      if (action == "start") s->start();
      if (action == "pause") s->pause();
      if (action == "stop") s->stop();
      return reply(200, message("status", {{"id", s->id()}, {"status", to_string(s->status())}}));
    } else if (action == "demo" && m == "POST") {
      if (sub == "begin") {
        s->begin_demo();
        return reply(200, message("status", {{"id", s->id()}, {"status", to_string(s->status())}}));
      }
      if (sub == "sample") {
        add_samples(*s, parse_body(req.body));
        return reply(200, message("status", {{"id", s->id()}, {"status", to_string(s->status())}}));
      }
      if (sub == "end") return reply(200, to_json(s->end_demo()));
    } else if (action == "feedback" && m == "POST") {
      return reply(200, to_json(s->submit_feedback(feedback_from_json(parse_body(req.body)))));
    } else if (action == "tick" && m == "POST") {
      const json body = parse_body(req.body);
      const long n = body.value("ticks", 1L);
      if (n < 1 || n > 100000) throw InvalidArgument("ticks must be in [1, 100000]");
      json last = nullptr;
      for (long i = 0; i < n; ++i) {
        TickResult r = s->tick();
        if (r.error) return fail(409, "diverged", *r.error);
        if (!r.state) throw StateError("tick needs a running session");
        if (i + 1 == n) last = to_json(*r.state);
      }
      return reply(200, last);
    } else if (action == "field" && m == "POST") {
      const policy::FieldGrid g = s->field_snapshot(policy::field_spec_from_json(parse_body(req.body)));
      return reply(200, message("field", policy::to_json(g)));
    } else if (action == "policy") {
      if (m == "GET") return reply(200, s->export_policy());
      if (m == "PUT" || m == "POST") {
        s->import_policy(parse_body(req.body));
        return reply(200, message("session", s->describe()));
      }
    } else if (action == "log" && m == "GET") {
      ApiResponse r;
      r.content_type = "text/csv";
      r.body = s->log_csv();
      return r;
    } else {
      return fail(404, "not_found", req.path);
    }
    return fail(405, "method_not_allowed", m + " " + req.path);
  } catch (const StateError& e) {
    return fail(409, "invalid_state", e.what());
  } catch (const InvalidArgument& e) {
    return fail(400, "invalid_argument", e.what());
  } catch (const std::exception& e) {
    return fail(500, "internal", e.what());
  }
}

json Api::handle_socket_message(Session& s, const std::string& text) {
  try {
    json msg;
    try {
      msg = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InvalidArgument(std::string("message is not JSON: ") + e.what());
    }
    if (!msg.is_object() || !msg.contains("type")) {
      throw InvalidArgument("message needs a type");
    }
    if (msg.contains("protocol_version") && msg.at("protocol_version") != kProtocolVersion) {
      return error_message("protocol_version", "server speaks protocol_version 1");
    }
    const std::string type = msg.at("type").get<std::string>();
    if (type == "feedback") return to_json(s.submit_feedback(feedback_from_json(msg)));
    if (type == "start" || type == "pause" || type == "stop") {
      if (type == "start") s.start();
      if (type == "pause") s.pause();
      if (type == "stop") s.stop();
      return message("status", {{"id", s.id()}, {"status", to_string(s.status())}});
    }
    if (type == "field") {
      json spec = msg;
      spec.erase("type");
      spec.erase("protocol_version");
      return message("field", policy::to_json(s.field_snapshot(policy::field_spec_from_json(spec))));
    }
    if (type == "ping") return message("pong");
    return error_message("unknown_type", type);
  } catch (const StateError& e) {
    return error_message("invalid_state", e.what());
  } catch (const InvalidArgument& e) {
    return error_message("invalid_argument", e.what());
  } catch (const std::exception& e) {
    return error_message("internal", e.what());
  }
}

}  // namespace ilosa::service
