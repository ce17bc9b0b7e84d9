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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ilosa/common.hpp"
#include "ilosa/policy/policy.hpp"
#include "ilosa/sim/environment.hpp"

namespace ilosa::teacher {

// Densely sampled curve with cumulative arc length.
class ReferencePath {
 public:
  ReferencePath() = default;
  ReferencePath(std::vector<Vec3> points, bool closed);

  double length() const { return arc_.empty() ? 0.0 : arc_.back(); }
  bool closed() const { return closed_; }
  const std::vector<Vec3>& points() const { return points_; }
  Vec3 start() const { return points_.front(); }
  Vec3 end() const { return points_.back(); }

  Vec3 point_at(double s) const;
  Vec3 tangent_at(double s) const;
  // Arc length of the closest point within [s_lo, s_hi] (wrapped for
  // closed paths, so the result may exceed length()).
  double project(const Vec3& x, double s_lo, double s_hi) const;

 private:
  double wrap(double s) const;
  std::vector<Vec3> points_;
  std::vector<double> arc_;
  bool closed_ = false;
};

struct TaskGeometry {
  std::string task;
  int variant = 0;
  ReferencePath path;              // demonstrated path
  std::optional<ReferencePath> detour;  // corrected path, if different
  Vec3 goal = Vec3::Zero();
  bool cyclic = false;
};

// Known tasks: unplug (variant 0..2 sets the apex height 0.10/0.15/0.20 m),
// box, wipe, wipe_obstacle, plug_insert. Throws InvalidArgument otherwise.
TaskGeometry task_geometry(const std::string& task, int variant = 0);

std::vector<std::string> known_tasks();

// Obstacle placed on the wipe path for the wipe_obstacle task.
sim::AxisBox wipe_obstacle_box();

struct DemoOptions {
  double period = 0.01;      // s
  double peak_speed = 0.15;  // m/s, must stay <= 0.25
  double jitter = 0.002;     // m, bound on the jitter norm
};

struct Demonstration {
  policy::TimedTrajectory trajectory;
  std::string task;
  int variant = 0;
  std::uint64_t seed = 0;
};

// Minimum-jerk timing along the task path (constant speed for the closed
// wipe loop) plus smooth seeded jitter that vanishes at the endpoints.
Demonstration scripted_demo(const std::string& task, int variant,
                            std::uint64_t seed, const DemoOptions& options = {});

}  // namespace ilosa::teacher
