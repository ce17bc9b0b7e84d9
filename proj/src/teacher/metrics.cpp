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

#include "ilosa/teacher/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace ilosa::teacher {

double goal_error(const EpisodeLog& log, const Vec3& goal) {
  return (log.final_state.position - goal).norm();
}

long append_count(const std::vector<FeedbackRecord>& feedback) {
  return static_cast<long>(std::count_if(feedback.begin(), feedback.end(), [](const auto& f) {
    return f.branch == policy::FeedbackBranch::kAppend;
  }));
}

std::optional<double> data_efficiency(long events, long appends) {
  if (events <= 0) return std::nullopt;
  if (appends < 0 || appends > events) {
    throw InvalidArgument("append count must be within [0, events]");
  }
  return 100.0 * static_cast<double>(events - appends) / static_cast<double>(events);
}

std::optional<double> data_efficiency(const std::vector<FeedbackRecord>& feedback) {
  return data_efficiency(static_cast<long>(feedback.size()), append_count(feedback));
}

double feedback_time(const EpisodeLog& log) {
  long n = 0;
  for (const FeedbackRecord& f : log.feedback) n += f.event.goal_flag ? 0 : 1;
  return static_cast<double>(n) * log.control_period;
}

double peak_speed(const EpisodeLog& log, double t0, double t1) {
  double best = 0.0;
  for (const TickRecord& t : log.ticks) {
    if (t.time >= t0 && t.time <= t1) best = std::max(best, t.velocity.norm());
  }
  return best;
}

std::vector<std::vector<const TickRecord*>> split_loop_ticks(const EpisodeLog& log,
                                                             const Vec3& start,
                                                             double radius,
                                                             double min_excursion) {
  // Cut at the tick closest to `start` within each visit of the radius ball.
  std::vector<size_t> cuts;
  bool away = true;
  bool inside = false;
  size_t best = 0;
  double best_d = 0.0;
  for (size_t i = 0; i < log.ticks.size(); ++i) {
    const double d = (log.ticks[i].position - start).norm();
    if (d >= min_excursion) away = true;
    if (d <= radius && (inside || away)) {
      if (!inside || d < best_d) {
        best = i;
        best_d = d;
      }
      inside = true;
      away = false;
    } else if (inside && d > radius) {
      cuts.push_back(best);
      inside = false;
    }
  }
  if (inside) cuts.push_back(best);
  std::vector<std::vector<const TickRecord*>> loops;
  for (size_t c = 1; c < cuts.size(); ++c) {
    std::vector<const TickRecord*> loop;
    for (size_t i = cuts[c - 1]; i <= cuts[c]; ++i) loop.push_back(&log.ticks[i]);
    loops.push_back(std::move(loop));
  }
  return loops;
}

std::vector<Trace> split_loops(const EpisodeLog& log, const Vec3& start, double radius,
                               double min_excursion) {
  std::vector<Trace> out;
  for (const auto& loop : split_loop_ticks(log, start, radius, min_excursion)) {
    Trace tr;
    tr.reserve(loop.size());
    for (const TickRecord* t : loop) tr.push_back(t->position);
    out.push_back(std::move(tr));
  }
  return out;
}

Trace resample_trace(const Trace& trace, int n) {
  if (trace.empty() || n < 1) throw InvalidArgument("resample_trace: empty input");
  std::vector<double> arc(trace.size(), 0.0);
  for (size_t i = 1; i < trace.size(); ++i) {
    arc[i] = arc[i - 1] + (trace[i] - trace[i - 1]).norm();
  }
  Trace out(static_cast<size_t>(n));
  if (arc.back() <= 0.0) {
    std::fill(out.begin(), out.end(), trace.front());
    return out;
  }
  size_t a = 0;
  for (int i = 0; i < n; ++i) {
    const double s = n == 1 ? 0.0 : arc.back() * i / (n - 1);
    while (a + 2 < arc.size() && arc[a + 1] < s) ++a;
    const size_t b = std::min(a + 1, trace.size() - 1);
    const double span = arc[b] - arc[a];
    const double w = span > 0.0 ? std::clamp((s - arc[a]) / span, 0.0, 1.0) : 0.0;
    out[static_cast<size_t>(i)] = (1.0 - w) * trace[a] + w * trace[b];
  }
  return out;
}

double trace_rmse(const Trace& a, const Trace& b, int samples) {
  const Trace ra = resample_trace(a, samples), rb = resample_trace(b, samples);
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    sum += (ra[static_cast<size_t>(i)] - rb[static_cast<size_t>(i)]).squaredNorm();
  }
  return std::sqrt(sum / samples);
}

double loop_consistency(const std::vector<Trace>& loops, int samples) {
  double worst = 0.0;
  for (size_t i = 0; i < loops.size(); ++i) {
    for (size_t j = i + 1; j < loops.size(); ++j) {
      worst = std::max(worst, trace_rmse(loops[i], loops[j], samples));
    }
  }
  return worst;
}

double force_coverage(const std::vector<const TickRecord*>& ticks, double threshold) {
  if (ticks.empty()) return 0.0;
  long ok = 0;
  for (const TickRecord* t : ticks) ok += t->normal_force >= threshold ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(ticks.size());
}

EpisodeMetrics episode_metrics(const EpisodeLog& log, const Vec3& goal) {
  EpisodeMetrics m;
  m.goal_error = goal_error(log, goal);
  m.data_efficiency = data_efficiency(log.feedback);
  m.feedback_time = feedback_time(log);
  m.peak_speed = peak_speed(log);
  m.feedback_events = static_cast<long>(log.feedback.size());
  m.append_events = append_count(log.feedback);
  return m;
}

}  // namespace ilosa::teacher
