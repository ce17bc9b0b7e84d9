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

#include "ilosa/policy/io.hpp"

#include <fstream>
#include <sstream>

#include "ilosa/gp/serialize.hpp"

namespace ilosa::policy {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "ilosa-policy";

std::vector<double> split_numbers(const std::string& line, size_t lineno) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t\r", used) != std::string::npos) {
        throw std::invalid_argument(cell);
      }
    } catch (const std::exception&) {
      throw InvalidArgument("demo csv line " + std::to_string(lineno) +
                            ": bad number '" + cell + "'");
    }
  }
  return out;
}

}  // namespace

json to_json(const PolicyState& p) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = 1;
  doc["config"] = to_json(p.config);
  doc["stabilization_gain"] = p.stabilization_gain;
  doc["attractor"] = gp::to_json(p.attractor);
  doc["stiffness"] = json::array();
  for (const gp::GPModel& m : p.stiffness) doc["stiffness"].push_back(gp::to_json(m));
  return doc;
}

PolicyState policy_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormat) {
      throw InvalidArgument("not a policy document");
    }
    if (doc.at("version").get<int>() != 1) {
      throw InvalidArgument("unsupported policy version");
    }
    PolicyState p;
    p.config = config_from_json(doc.at("config"));
    p.config.validate();
    p.stabilization_gain = doc.at("stabilization_gain").get<double>();
    p.attractor = gp::model_from_json(doc.at("attractor"));
    const json& stiff = doc.at("stiffness");
    if (!stiff.is_array() || stiff.size() != 3) {
      throw InvalidArgument("policy needs three stiffness models");
    }
    for (int d = 0; d < 3; ++d) {
      const json& s = stiff[static_cast<size_t>(d)];
      const Eigen::MatrixXd inputs = gp::matrix_from_json(s.at("inputs"), 3);
      if (inputs != p.attractor.inputs()) {
        throw InvalidArgument("stiffness inputs differ from attractor inputs");
      }
      p.stiffness[d] = gp::GPModel::with_targets(
          p.attractor, gp::matrix_from_json(s.at("targets"), 1),
          gp::vector_from_json(s.at("prior_mean")));
    }
    return p;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed policy document: ") + e.what());
  }
}

void save_policy(const PolicyState& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << to_json(p).dump(1) << '\n';
}

PolicyState load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
  return policy_from_json(doc);
}

TimedTrajectory read_demo_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  TimedTrajectory demo;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (lineno == 1 && line.find_first_of("tT") != std::string::npos &&
        line.find_first_of("0123456789") == std::string::npos) {
      continue;  // header
    }
    const std::vector<double> v = split_numbers(line, lineno);
    if (v.size() != 4) {
      throw InvalidArgument("demo csv line " + std::to_string(lineno) +
                            ": expected t,x,y,z");
    }
    demo.times.push_back(v[0]);
    demo.positions.emplace_back(v[1], v[2], v[3]);
  }
  return demo;
}

TimedTrajectory demo_from_json(const json& doc) {
  try {
    TimedTrajectory demo;
    demo.times = doc.at("t").get<std::vector<double>>();
    for (const json& row : doc.at("positions")) {
      const auto p = row.get<std::vector<double>>();
      if (p.size() != 3) throw InvalidArgument("demo positions must be 3-D");
      demo.positions.emplace_back(p[0], p[1], p[2]);
    }
    if (demo.times.size() != demo.positions.size()) {
      throw InvalidArgument("demo t and positions differ in length");
    }
    return demo;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed demo: ") + e.what());
  }
}

TimedTrajectory load_demo(const std::string& path) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read " + path);
    try {
      return demo_from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw InvalidArgument(path + ": " + e.what());
    }
  }
  return read_demo_csv(path);
}

void write_demo_csv(const TimedTrajectory& demo, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out.precision(17);
  out << "t,x,y,z\n";
  for (size_t i = 0; i < demo.size(); ++i) {
    const Vec3& p = demo.positions[i];
    out << demo.times[i] << ',' << p.x() << ',' << p.y() << ',' << p.z() << '\n';
  }
}

json to_json(const TimedTrajectory& demo) {
  json doc;
  doc["t"] = demo.times;
  doc["positions"] = json::array();
  for (const Vec3& p : demo.positions) doc["positions"].push_back({p.x(), p.y(), p.z()});
  return doc;
}

}  // namespace ilosa::policy
