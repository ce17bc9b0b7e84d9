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

#include "ilosa/policy/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace ilosa::policy {

using nlohmann::json;

std::array<int, 2> FieldSpec::plane_axes() const {
  switch (slice_axis) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

void FieldSpec::validate() const {
  if (slice_axis < 0 || slice_axis > 2) {
    throw InvalidArgument("field slice axis must be 0, 1 or 2");
  }
  if (!std::isfinite(slice_value)) throw InvalidArgument("field slice value");
  for (int k = 0; k < 2; ++k) {
    if (!std::isfinite(lower[k]) || !std::isfinite(upper[k]) ||
        !(upper[k] >= lower[k])) {
      throw InvalidArgument("field bounds must be finite with upper >= lower");
    }
    if (resolution[k] < 1 || resolution[k] > kMaxFieldResolution) {
      throw InvalidArgument("field resolution must be in [1, " +
                            std::to_string(kMaxFieldResolution) + "]");
    }
  }
}

Vec3 FieldSpec::cell_position(int iu, int iv) const {
  const std::array<int, 2> axes = plane_axes();
  const std::array<int, 2> idx{iu, iv};
  Vec3 x = Vec3::Zero();
  x[slice_axis] = slice_value;
  for (int k = 0; k < 2; ++k) {
    const int n = resolution[k];
    x[axes[k]] = n == 1 ? 0.5 * (lower[k] + upper[k])
                        : lower[k] + (upper[k] - lower[k]) * idx[k] / (n - 1);
  }
  return x;
}

namespace {

FieldCell make_cell(const PolicyState& p, const Vec3& x) {
  const ControlCommand cmd = query(p, x);
  FieldCell c;
  c.position = x;
  c.force = cmd.spring_force();
  c.sigma_rel = std::clamp(cmd.variance_rel, 0.0, 1.0);
  c.stabilization = cmd.stabilization_force;
  return c;
}

FieldGrid prepare(const PolicyState& p, const FieldSpec& spec) {
  spec.validate();
  if (p.empty()) throw InvalidArgument("field of an empty policy");
  FieldGrid g;
  g.spec = spec;
  g.cells.resize(static_cast<size_t>(spec.resolution[0]) * spec.resolution[1]);
  return g;
}

}  // namespace

FieldGrid evaluate_field(const PolicyState& p, const FieldSpec& spec) {
  FieldGrid g = prepare(p, spec);
  const int nu = spec.resolution[0];
  const int total = static_cast<int>(g.cells.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < total; ++i) {
    g.cells[static_cast<size_t>(i)] =
        make_cell(p, spec.cell_position(i % nu, i / nu));
  }
  return g;
}

namespace reference {
FieldGrid evaluate_field(const PolicyState& p, const FieldSpec& spec) {
  FieldGrid g = prepare(p, spec);
  for (int iv = 0; iv < spec.resolution[1]; ++iv) {
    for (int iu = 0; iu < spec.resolution[0]; ++iu) {
      g.cells[static_cast<size_t>(iv * spec.resolution[0] + iu)] =
          make_cell(p, spec.cell_position(iu, iv));
    }
  }
  return g;
}
}  // namespace reference

void write_field_csv(const FieldGrid& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out.precision(10);
  const std::array<int, 2> a = g.spec.plane_axes();
  out << "x,y,fx,fy,sigma_rel,fsx,fsy\n";
  for (const FieldCell& c : g.cells) {
    out << c.position[a[0]] << ',' << c.position[a[1]] << ',' << c.force[a[0]]
        << ',' << c.force[a[1]] << ',' << c.sigma_rel << ','
        << c.stabilization[a[0]] << ',' << c.stabilization[a[1]] << '\n';
  }
}

json to_json(const FieldGrid& g) {
  const std::array<int, 2> a = g.spec.plane_axes();
  json doc;
  doc["slice_axis"] = g.spec.slice_axis;
  doc["slice_value"] = g.spec.slice_value;
  doc["lower"] = g.spec.lower;
  doc["upper"] = g.spec.upper;
  doc["resolution"] = g.spec.resolution;
  json force = json::array(), sigma = json::array(), stab = json::array();
  for (const FieldCell& c : g.cells) {
    force.push_back({c.force[a[0]], c.force[a[1]]});
    sigma.push_back(c.sigma_rel);
    stab.push_back({c.stabilization[a[0]], c.stabilization[a[1]]});
  }
  doc["force"] = std::move(force);
  doc["sigma_rel"] = std::move(sigma);
  doc["f_stable"] = std::move(stab);
  return doc;
}

FieldSpec field_spec_from_json(const json& doc) {
  FieldSpec s;
  try {
    s.slice_axis = doc.value("slice_axis", s.slice_axis);
    s.slice_value = doc.value("slice_value", s.slice_value);
    s.lower = doc.at("lower").get<std::array<double, 2>>();
    s.upper = doc.at("upper").get<std::array<double, 2>>();
    s.resolution = doc.value("resolution", s.resolution);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed field request: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace ilosa::policy
