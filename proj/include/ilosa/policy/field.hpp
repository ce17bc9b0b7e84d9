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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ilosa/policy/policy.hpp"

namespace ilosa::policy {

inline constexpr int kMaxFieldResolution = 200;

// A 2-D grid on the plane {x[slice_axis] = slice_value}. The two in-plane
// axes are the remaining ones in increasing order ("u" then "v").
struct FieldSpec {
  int slice_axis = 2;
  double slice_value = 0.0;
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{1.0, 1.0};
  std::array<int, 2> resolution{50, 50};

  std::array<int, 2> plane_axes() const;
  // Throws InvalidArgument for bad axes, bounds, or resolution outside
  // [1, kMaxFieldResolution].
  void validate() const;
  Vec3 cell_position(int iu, int iv) const;
};

struct FieldCell {
  Vec3 position = Vec3::Zero();
  Vec3 force = Vec3::Zero();  // K_s * dx after modulation, N
  double sigma_rel = 0.0;
  Vec3 stabilization = Vec3::Zero();
};

// Row-major over (iv, iu): cell index = iv * resolution[0] + iu.
struct FieldGrid {
  FieldSpec spec;
  std::vector<FieldCell> cells;
};

// Evaluates query() on every cell in parallel. Throws InvalidArgument on an
// empty policy.
FieldGrid evaluate_field(const PolicyState& policy, const FieldSpec& spec);

namespace reference {
FieldGrid evaluate_field(const PolicyState& policy, const FieldSpec& spec);
}

// Columns: x,y,fx,fy,sigma_rel,fsx,fsy with x,y the in-plane coordinates.
void write_field_csv(const FieldGrid& grid, const std::string& path);
nlohmann::json to_json(const FieldGrid& grid);
FieldSpec field_spec_from_json(const nlohmann::json& doc);

}  // namespace ilosa::policy
