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

#include <limits>
#include <optional>
#include <vector>

#include "ilosa/teacher/episode.hpp"

namespace ilosa::teacher {

double goal_error(const EpisodeLog& log, const Vec3& goal);

// (feedback events - appends) / feedback events * 100; absent without
// feedback. Goal events count as appends.
std::optional<double> data_efficiency(const std::vector<FeedbackRecord>& feedback);
std::optional<double> data_efficiency(long feedback_events, long append_events);
long append_count(const std::vector<FeedbackRecord>& feedback);

// Corrective (non-goal) feedback events times the control period.
double feedback_time(const EpisodeLog& log);

// Max speed over ticks with time in [t0, t1].
double peak_speed(const EpisodeLog& log, double t0 = 0.0,
                  double t1 = std::numeric_limits<double>::infinity());

using Trace = std::vector<Vec3>;

// Splits the tick positions into loops. Each visit of the `radius` ball
// around `start` (after an excursion of at least `min_excursion`) yields a
// cut at its closest tick; loops run between consecutive cuts.
std::vector<Trace> split_loops(const EpisodeLog& log, const Vec3& start, double radius,
                               double min_excursion);
std::vector<std::vector<const TickRecord*>> split_loop_ticks(const EpisodeLog& log,
                                                             const Vec3& start,
                                                             double radius,
                                                             double min_excursion);

// Resamples a trace to n points equally spaced in arc length.
Trace resample_trace(const Trace& trace, int n);

double trace_rmse(const Trace& a, const Trace& b, int samples = 200);

// Max pairwise RMSE between loops, each resampled by normalized time.
double loop_consistency(const std::vector<Trace>& loops, int samples = 200);

// Fraction of ticks with normal force >= threshold.
double force_coverage(const std::vector<const TickRecord*>& ticks, double threshold);

struct EpisodeMetrics {
  double goal_error = 0.0;
  std::optional<double> data_efficiency;
  double feedback_time = 0.0;
  double peak_speed = 0.0;
  long feedback_events = 0;
  long append_events = 0;
};

EpisodeMetrics episode_metrics(const EpisodeLog& log, const Vec3& goal);

}  // namespace ilosa::teacher
