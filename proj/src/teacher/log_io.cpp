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

#include "ilosa/teacher/log_io.hpp"

#include <fstream>
#include <sstream>

namespace ilosa::teacher {

const char* const kLogHeader =
    "t,x,y,z,vx,vy,vz,dx,dy,dz,kx,ky,kz,sigma,sigma_rel,fsx,fsy,fsz,"
    "fex,fey,fez,fpx,fpy,fpz,normal_force,feedback,branch,db_size";

namespace {
constexpr int kColumns = 28;

void put(std::ostream& out, const Vec3& v) {
  out << ',' << v.x() << ',' << v.y() << ',' << v.z();
}
}  // namespace

void write_log_csv(const std::vector<TickRecord>& ticks, std::ostream& out) {
  out.precision(12);
  out << kLogHeader << '\n';
  for (const TickRecord& t : ticks) {
    out << t.time;
    put(out, t.position);
    put(out, t.velocity);
    put(out, t.command.attractor_displacement);
    put(out, t.command.stiffness);
    out << ',' << t.command.variance << ',' << t.command.variance_rel;
    put(out, t.command.stabilization_force);
    put(out, t.env_force);
    put(out, t.perturbation);
    out << ',' << t.normal_force << ',' << t.feedback << ',' << t.branch << ','
        << t.database_size << '\n';
  }
}

void write_log_csv(const EpisodeLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  write_log_csv(log.ticks, out);
}

std::vector<TickRecord> read_log_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != kLogHeader) {
    throw InvalidArgument(path + ": not an episode log (header mismatch)");
  }
  std::vector<TickRecord> ticks;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidArgument(path + ":" + std::to_string(lineno) + ": bad number");
      }
    }
    if (v.size() != kColumns) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(kColumns) + " columns");
    }
    auto vec = [&](int i) { return Vec3(v[i], v[i + 1], v[i + 2]); };
    TickRecord t;
    t.time = v[0];
    t.position = vec(1);
    t.velocity = vec(4);
    t.command.origin = t.position;
    t.command.attractor_displacement = vec(7);
    t.command.stiffness = vec(10);
    t.command.variance = v[13];
    t.command.variance_rel = v[14];
    t.command.stabilization_force = vec(15);
    t.env_force = vec(18);
    t.perturbation = vec(21);
    t.normal_force = v[24];
    t.feedback = static_cast<int>(v[25]);
    t.branch = static_cast<int>(v[26]);
    t.database_size = static_cast<long>(v[27]);
    ticks.push_back(t);
  }
  return ticks;
}

}  // namespace ilosa::teacher
