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

#include "ilosa/teacher/demos.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace ilosa::teacher {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSpacing = 5e-4;  // m between reference samples

// Samples a parametric curve densely enough for kSpacing.
void append_curve(std::vector<Vec3>& out, const std::function<Vec3(double)>& f,
                  double approx_length) {
  const int n = std::max(2, static_cast<int>(std::ceil(approx_length / kSpacing)));
  for (int i = out.empty() ? 0 : 1; i <= n; ++i) out.push_back(f(static_cast<double>(i) / n));
}

void append_line(std::vector<Vec3>& out, const Vec3& a, const Vec3& b) {
  append_curve(out, [&](double u) { return Vec3(a + u * (b - a)); }, (b - a).norm());
}

void append_arc(std::vector<Vec3>& out, const Vec3& center, double r,
                double theta0, double theta1) {
  append_curve(
      out,
      [&](double u) {
        const double th = theta0 + u * (theta1 - theta0);
        return Vec3(center + r * Vec3(std::cos(th), std::sin(th), 0.0));
      },
      r * std::abs(theta1 - theta0));
}

// Counter-clockwise rounded rectangle starting mid bottom edge.
std::vector<Vec3> wipe_loop() {
  const double w = 0.3, h = 0.15, r = 0.03;
  std::vector<Vec3> p;
  append_line(p, Vec3(w / 2, 0, 0), Vec3(w - r, 0, 0));
  append_arc(p, Vec3(w - r, r, 0), r, -kPi / 2, 0.0);
  append_line(p, Vec3(w, r, 0), Vec3(w, h - r, 0));
  append_arc(p, Vec3(w - r, h - r, 0), r, 0.0, kPi / 2);
  append_line(p, Vec3(w - r, h, 0), Vec3(r, h, 0));
  append_arc(p, Vec3(r, h - r, 0), r, kPi / 2, kPi);
  append_line(p, Vec3(0, h - r, 0), Vec3(0, r, 0));
  append_arc(p, Vec3(r, r, 0), r, kPi, 1.5 * kPi);
  append_line(p, Vec3(r, 0, 0), Vec3(w / 2, 0, 0));
  p.back() = p.front();
  return p;
}

// Smooth outward bulge of the top edge around the obstacle.
std::vector<Vec3> wipe_detour() {
  std::vector<Vec3> p = wipe_loop();
  const double a = 0.04, b = 0.26, bulge = 0.05;
  for (Vec3& q : p) {
    if (q.y() > 0.149 && q.x() > a && q.x() < b) {
      const double s = std::sin(kPi * (q.x() - a) / (b - a));
      q.y() += bulge * s * s;
    }
  }
  return p;
}

double min_jerk(double tau) {
  return tau * tau * tau * (10.0 - 15.0 * tau + 6.0 * tau * tau);
}

}  // namespace

ReferencePath::ReferencePath(std::vector<Vec3> points, bool closed)
    : points_(std::move(points)), closed_(closed) {
  if (points_.size() < 2) throw InvalidArgument("reference path needs >= 2 points");
  arc_.resize(points_.size());
  arc_[0] = 0.0;
  for (size_t i = 1; i < points_.size(); ++i) {
    arc_[i] = arc_[i - 1] + (points_[i] - points_[i - 1]).norm();
  }
  if (!(length() > 0.0)) throw InvalidArgument("reference path has zero length");
}

double ReferencePath::wrap(double s) const {
  if (closed_) {
    s = std::fmod(s, length());
    if (s < 0.0) s += length();
    return s;
  }
  return std::clamp(s, 0.0, length());
}

Vec3 ReferencePath::point_at(double s) const {
  s = wrap(s);
  const auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
  const size_t i = std::clamp<size_t>(static_cast<size_t>(it - arc_.begin()), 1, arc_.size() - 1);
  const double seg = arc_[i] - arc_[i - 1];
  const double w = seg > 0.0 ? (s - arc_[i - 1]) / seg : 0.0;
  return (1.0 - w) * points_[i - 1] + w * points_[i];
}

Vec3 ReferencePath::tangent_at(double s) const {
  const double h = 2.0 * kSpacing;
  double a = s - h, b = s + h;
  if (!closed_) {
    a = std::max(0.0, a);
    b = std::min(length(), b);
  }
  const Vec3 d = point_at(b) - point_at(a);
  return d.norm() > 0.0 ? Vec3(d.normalized()) : Vec3::UnitX();
}

double ReferencePath::project(const Vec3& x, double s_lo, double s_hi) const {
  if (!closed_) {
    s_lo = std::clamp(s_lo, 0.0, length());
    s_hi = std::clamp(s_hi, s_lo, length());
  }
  const int n = std::max(2, static_cast<int>(std::ceil((s_hi - s_lo) / kSpacing)));
  double best_s = s_lo, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double s = s_lo + (s_hi - s_lo) * i / n;
    const double d = (point_at(s) - x).squaredNorm();
    if (d < best) {
      best = d;
      best_s = s;
    }
  }
  return best_s;
}

std::vector<std::string> known_tasks() {
  return {"unplug", "box", "wipe", "wipe_obstacle", "plug_insert"};
}

sim::AxisBox wipe_obstacle_box() {
  return {Vec3(0.12, 0.13, -0.05), Vec3(0.18, 0.17, 0.05)};
}

TaskGeometry task_geometry(const std::string& task, int variant) {
  TaskGeometry g;
  g.task = task;
  g.variant = variant;
  if (task == "unplug") {
    if (variant < 0 || variant > 2) throw InvalidArgument("unplug variant must be 0..2");
    const double apex = 0.10 + 0.05 * variant;
    const Vec3 goal(0.35, 0.15, 0.05);
    const double c = apex - goal.z() / 4.0;
    std::vector<Vec3> p;
    append_line(p, Vec3::Zero(), Vec3(0.05, 0, 0));
    append_curve(
        p,
        [&](double w) {
          const double s = std::sin(kPi * w);
          return Vec3(0.05 + 0.3 * w, goal.y() * w * w, goal.z() * w * w + c * s * s);
        },
        0.6);
    g.path = ReferencePath(std::move(p), false);
    g.goal = goal;
  } else if (task == "box") {
    std::vector<Vec3> p;
    append_line(p, Vec3::Zero(), Vec3(0.3, 0, 0));
    g.path = ReferencePath(std::move(p), false);
    g.goal = Vec3(0.3, 0, 0);
  } else if (task == "wipe" || task == "wipe_obstacle") {
    g.path = ReferencePath(wipe_loop(), true);
    if (task == "wipe_obstacle") g.detour = ReferencePath(wipe_detour(), true);
    g.goal = g.path.start();
    g.cyclic = true;
  } else if (task == "plug_insert") {
    const Vec3 a(0, 0, 0.15), c(0.2, 0, 0.15), b(0.2, 0, 0.05);
    std::vector<Vec3> p;
    append_curve(
        p,
        [&](double u) {
          return Vec3((1 - u) * (1 - u) * a + 2 * u * (1 - u) * c + u * u * b);
        },
        0.3);
    append_line(p, b, Vec3(0.2, 0, 0.0));
    g.path = ReferencePath(std::move(p), false);
    g.goal = Vec3(0.2, 0, 0.0);
  } else {
    throw InvalidArgument("unknown task '" + task + "'");
  }
  return g;
}

Demonstration scripted_demo(const std::string& task, int variant,
                            std::uint64_t seed, const DemoOptions& options) {
  if (!(options.period > 0.0)) throw InvalidArgument("demo period must be > 0");
  if (!(options.peak_speed > 0.0 && options.peak_speed <= 0.25)) {
    throw InvalidArgument("demo peak speed must be in (0, 0.25] m/s");
  }
  if (!(options.jitter >= 0.0 && options.jitter <= 0.002)) {
    throw InvalidArgument("demo jitter must be in [0, 2 mm]");
  }
  const TaskGeometry g = task_geometry(task, variant);
  const double length = g.path.length();

  size_t steps = 0;
  if (g.cyclic) {
    steps = static_cast<size_t>(std::ceil(length / (options.peak_speed * options.period)));
  } else {
    // min-jerk peak speed is 1.875 L / T
    steps = static_cast<size_t>(
        std::ceil(1.875 * length / (options.peak_speed * options.period)));
  }

  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 0x5eedULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Wave {
    double amplitude, frequency, phase;
  };
  std::array<std::array<Wave, 3>, 3> waves{};
  for (auto& axis : waves) {
    double weights[3], total = 0.0;
    for (double& w : weights) total += (w = 0.2 + unit(rng));
    // the cyclic form below subtracts the start offset, doubling the range
    const double axis_amp = options.jitter / std::sqrt(3.0) * (0.5 + 0.5 * unit(rng)) /
                            (g.cyclic ? 2.0 : 1.0);
    for (int j = 0; j < 3; ++j) {
      // integer frequencies keep a closed loop closed
      const double f = g.cyclic ? 1.0 + std::floor(4.0 * unit(rng)) : 0.5 + 2.5 * unit(rng);
      axis[j] = {axis_amp * weights[j] / total, f, 2.0 * kPi * unit(rng)};
    }
  }

  std::vector<Vec3> positions;
  positions.reserve(steps + 1);
  for (size_t k = 0; k <= steps; ++k) {
    const double tau = static_cast<double>(k) / static_cast<double>(steps);
    const double s = g.cyclic ? tau * length : min_jerk(tau) * length;
    Vec3 p = g.path.point_at(g.cyclic && k == steps ? 0.0 : s);
    const double envelope = g.cyclic ? 1.0 : std::sin(kPi * tau);
    for (int d = 0; d < 3; ++d) {
      double j = 0.0;
      for (const Wave& w : waves[d]) {
        j += w.amplitude * (g.cyclic ? std::sin(2.0 * kPi * w.frequency * tau + w.phase) -
                                           std::sin(w.phase)
                                     : std::sin(2.0 * kPi * w.frequency * tau + w.phase));
      }
      p[d] += envelope * j;
    }
    positions.push_back(p);
  }
  if (g.cyclic) positions.back() = positions.front();

  Demonstration demo;
  demo.trajectory = policy::TimedTrajectory::uniform(std::move(positions), options.period);
  demo.task = task;
  demo.variant = variant;
  demo.seed = seed;
  return demo;
}

}  // namespace ilosa::teacher
