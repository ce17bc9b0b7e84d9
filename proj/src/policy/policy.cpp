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

#include "ilosa/policy/policy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ilosa/gp/train.hpp"

namespace ilosa::policy {

namespace {

constexpr double kTiny = 1e-12;

double sign(double v) { return v < 0.0 ? -1.0 : 1.0; }

Vec3 clamp_stiffness(const Vec3& k, const PolicyConfig& c) {
  return k.cwiseMax(c.stiffness_min).cwiseMin(c.stiffness_max);
}

Vec3 raw_stiffness(const PolicyState& p, const Vec3& x) {
  Vec3 k;
  for (int d = 0; d < 3; ++d) k[d] = gp::predict_mean(p.stiffness[d], x)[0];
  return clamp_stiffness(k, p.config);
}

Vec3 stabilization_from_gradient(const PolicyState& p, const Vec3& grad) {
  if (!p.config.stabilization) return Vec3::Zero();
  const double norm = grad.norm();
  if (!(norm > 0.0)) return Vec3::Zero();
  const double alpha =
      std::min(p.stabilization_gain, p.config.max_stabilization_force / norm);
  return -alpha * grad;
}

// Nominal gain: f_max over the 95th percentile of |grad Sigma| at demo
// inputs jittered by one lengthscale in a random direction.
double nominal_gain(const gp::GPModel& model, double f_max) {
  std::mt19937_64 rng(0x11054a5eULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::VectorXd l = model.hyper().lengthscales;
  std::vector<double> norms;
  norms.reserve(static_cast<size_t>(model.size()));
  for (Eigen::Index i = 0; i < model.size(); ++i) {
    Eigen::VectorXd dir(model.input_dim());
    for (Eigen::Index d = 0; d < dir.size(); ++d) dir[d] = normal(rng);
    dir.normalize();
    const Eigen::VectorXd probe =
        model.inputs().row(i).transpose() + dir.cwiseProduct(l);
    norms.push_back(gp::variance_gradient(model, probe).norm());
  }
  const size_t k = static_cast<size_t>(0.95 * static_cast<double>(norms.size() - 1));
  std::nth_element(norms.begin(), norms.begin() + static_cast<long>(k), norms.end());
  const double scale = norms[k];
  return scale > 0.0 ? f_max / scale : 0.0;
}

// Append (or overwrite, when x duplicates an existing input) one sample in
// all four models, keeping their input sets identical.
PolicyState append_sample(const PolicyState& p, const Vec3& x,
                          const Vec3& displacement, const Vec3& stiffness) {
  PolicyState out = p;
  out.attractor = gp::append(p.attractor, x, displacement);
  const Eigen::Index dup = gp::find_duplicate(p.attractor, x);
  for (int d = 0; d < 3; ++d) {
    Eigen::MatrixXd targets = p.stiffness[d].targets();
    if (dup >= 0) {
      targets(dup, 0) = stiffness[d];
    } else {
      targets.conservativeResize(targets.rows() + 1, Eigen::NoChange);
      targets(targets.rows() - 1, 0) = stiffness[d];
    }
    out.stiffness[d] = gp::GPModel::with_targets(out.attractor, std::move(targets),
                                                 p.stiffness[d].prior_mean());
  }
  return out;
}

}  // namespace

TimedTrajectory TimedTrajectory::uniform(std::vector<Vec3> positions,
                                         double period, double start) {
  TimedTrajectory t;
  t.times.reserve(positions.size());
  for (size_t i = 0; i < positions.size(); ++i) {
    t.times.push_back(start + period * static_cast<double>(i));
  }
  t.positions = std::move(positions);
  return t;
}

TimedTrajectory resample(const TimedTrajectory& demo, double period) {
  if (demo.positions.size() < 2 || demo.times.size() != demo.positions.size()) {
    throw InvalidArgument("demonstration needs >= 2 timed samples");
  }
  if (!(period > 0.0)) throw InvalidArgument("resample: period must be > 0");
  for (size_t i = 1; i < demo.times.size(); ++i) {
    if (!(demo.times[i] > demo.times[i - 1])) {
      throw InvalidArgument("demonstration timestamps must increase");
    }
  }
  const double t0 = demo.times.front();
  const double span = demo.times.back() - t0;
  // Tolerate rounding when the recording is already on the grid.
  const auto steps = static_cast<size_t>(std::floor(span / period + 1e-9));
  TimedTrajectory out;
  size_t seg = 0;
  for (size_t k = 0; k <= steps; ++k) {
    const double t = t0 + period * static_cast<double>(k);
    while (seg + 2 < demo.times.size() && demo.times[seg + 1] < t) ++seg;
    const double ta = demo.times[seg];
    const double tb = demo.times[seg + 1];
    const double w = std::clamp((t - ta) / (tb - ta), 0.0, 1.0);
    out.times.push_back(t);
    out.positions.push_back((1.0 - w) * demo.positions[seg] +
                            w * demo.positions[seg + 1]);
  }
  if (out.positions.size() < 2) {
    throw InvalidArgument("demonstration shorter than one control period");
  }
  return out;
}

void FeedbackEvent::validate() const {
  if (!increment.allFinite()) {
    throw InvalidArgument("feedback increment must be finite");
  }
  if (increment.cwiseAbs().maxCoeff() > 1.0) {
    throw InvalidArgument("feedback increment exceeds the unit device range");
  }
  if (!std::isfinite(timestamp)) {
    throw InvalidArgument("feedback timestamp must be finite");
  }
}

const char* to_string(FeedbackBranch branch) {
  return branch == FeedbackBranch::kAppend ? "append" : "correct";
}

PolicyState init_from_demos(const std::vector<TimedTrajectory>& demos,
                            const PolicyConfig& config) {
  config.validate();
  if (demos.empty()) throw InvalidArgument("init_from_demos: no demonstrations");
  std::vector<Vec3> from, step;
  for (const TimedTrajectory& raw : demos) {
    const TimedTrajectory demo = resample(raw, config.control_period);
    for (size_t t = 1; t < demo.size(); ++t) {
      from.push_back(demo.positions[t - 1]);
      step.push_back(demo.positions[t] - demo.positions[t - 1]);
    }
  }
  const auto n = static_cast<Eigen::Index>(from.size());
  Eigen::MatrixXd inputs(n, 3), targets(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    inputs.row(i) = from[static_cast<size_t>(i)].transpose();
    targets.row(i) = step[static_cast<size_t>(i)].transpose();
  }

  // Hyperparameters are optimized on an evenly strided subset when the
  // demonstrations are long; the full set is fitted afterwards.
  const Eigen::Index stride =
      std::max<Eigen::Index>(1, (n + config.max_training_points - 1) /
                                    config.max_training_points);
  const Eigen::Index m = (n + stride - 1) / stride;
  Eigen::MatrixXd sub_in(m, 3), sub_out(m, 3);
  for (Eigen::Index i = 0; i < m; ++i) {
    sub_in.row(i) = inputs.row(i * stride);
    sub_out.row(i) = targets.row(i * stride);
  }

  const double second_moment = targets.squaredNorm() / static_cast<double>(n * 3);
  const double sf2 = second_moment > 0.0 ? second_moment : 1e-6;
  gp::Hyperparameters init = gp::Hyperparameters::isotropic(
      3,
      std::clamp(config.init_lengthscale, config.lengthscale_min,
                 config.lengthscale_max),
      sf2, std::max(1e-3, 2.0 * config.noise_ratio_min) * sf2);
  gp::TrainOptions options;
  options.max_iterations = config.train_iterations;
  options.bounds.lengthscale_min = config.lengthscale_min;
  options.bounds.lengthscale_max = config.lengthscale_max;
  options.bounds.signal_variance_min = 1e-3 * sf2;
  options.bounds.signal_variance_max = 1e3 * sf2;
  options.bounds.noise_variance_min = config.noise_ratio_min * sf2;
  options.bounds.noise_variance_max = sf2;
  gp::Hyperparameters hyper = init;
  if (m >= 2 && config.train_iterations > 0) {
    hyper = gp::train(sub_in, sub_out, Eigen::VectorXd::Zero(3), init, options)
                .hyper();
  }

  PolicyState p;
  p.config = config;
  p.attractor = gp::GPModel::build(std::move(inputs), std::move(targets),
                                   Eigen::VectorXd::Zero(3), hyper);
  for (int d = 0; d < 3; ++d) {
    p.stiffness[d] = gp::GPModel::with_targets(
        p.attractor, Eigen::MatrixXd::Constant(n, 1, config.stiffness_mean),
        Eigen::VectorXd::Constant(1, config.stiffness_mean));
  }
  p.stabilization_gain =
      nominal_gain(p.attractor, config.max_stabilization_force);
  return p;
}

Increments interpret_feedback(const FeedbackEvent& feedback,
                              const Vec3& displacement, const Vec3& stiffness,
                              const PolicyConfig& c) {
  Increments inc;
  for (int d = 0; d < 3; ++d) {
    if (feedback.increment[d] == 0.0) continue;
    const double dx_inc = c.feedback_gain * feedback.increment[d];
    if (!c.bounded_attractor) {
      inc.displacement[d] = dx_inc;
      continue;
    }
    const double wanted = displacement[d] + dx_inc;
    const double k = stiffness[d];
    if (std::abs(wanted) >= c.attractor_limit ||
        k > c.stiffness_mean * (1.0 + 1e-9) + 1e-9) {
      // (K + K_inc) * limit = K * |dx + dx_inc|, attractor held at the limit.
      // A raised stiffness whose wanted force drops below K_mean * limit
      // relaxes back to K_mean with the same force.
      const double force = k * std::abs(wanted);
      if (std::abs(wanted) < c.attractor_limit &&
          force < c.stiffness_mean * c.attractor_limit) {
        inc.stiffness[d] = c.stiffness_mean - k;
        inc.displacement[d] = sign(wanted) * force / c.stiffness_mean - displacement[d];
        continue;
      }
      const double k_new =
          std::clamp(force / c.attractor_limit, c.stiffness_min, c.stiffness_max);
      inc.stiffness[d] = k_new - k;
      inc.displacement[d] = sign(wanted) * c.attractor_limit - displacement[d];
    } else {
      inc.displacement[d] = dx_inc;
    }
  }
  return inc;
}

FeedbackOutcome apply_feedback(const PolicyState& p, const Vec3& x,
                               const FeedbackEvent& feedback) {
  if (feedback.goal_flag) {
    throw InvalidArgument("apply_feedback: goal events go through mark_goal");
  }
  feedback.validate();
  if (p.empty()) throw InvalidArgument("apply_feedback: policy has no data");
  const gp::Prediction pred = gp::predict(p.attractor, x);
  const Vec3 displacement = pred.mean;
  const Vec3 stiffness = raw_stiffness(p, x);
  const Increments inc =
      interpret_feedback(feedback, displacement, stiffness, p.config);

  if (pred.variance <= p.config.append_threshold * p.sigma_max()) {
    try {
      PolicyState out = p;
      if (!inc.displacement.isZero(0.0)) {
        out.attractor = gp::correct_labels(p.attractor, x, inc.displacement);
        // correct_labels keeps the factorization; restore sharing explicitly.
        for (int d = 0; d < 3; ++d) {
          out.stiffness[d] = gp::GPModel::with_targets(
              out.attractor, p.stiffness[d].targets(),
              p.stiffness[d].prior_mean());
        }
      }
      for (int d = 0; d < 3; ++d) {
        if (inc.stiffness[d] == 0.0) continue;
        out.stiffness[d] = gp::correct_labels(
            out.stiffness[d], x, Eigen::VectorXd::Constant(1, inc.stiffness[d]));
      }
      return {std::move(out), FeedbackBranch::kCorrect};
    } catch (const CorrectionUndefined&) {
      // Weights vanish at x: fall through to the append branch.
    }
  }
  return {append_sample(p, x, displacement + inc.displacement,
                        stiffness + inc.stiffness),
          FeedbackBranch::kAppend};
}

FeedbackOutcome mark_goal(const PolicyState& p, const Vec3& x) {
  if (p.empty()) throw InvalidArgument("mark_goal: policy has no data");
  return {append_sample(p, x, Vec3::Zero(),
                        Vec3::Constant(p.config.stiffness_max)),
          FeedbackBranch::kAppend};
}

Vec3 stabilization_force(const PolicyState& p, const Vec3& x) {
  if (p.empty()) return Vec3::Zero();
  return stabilization_from_gradient(p, gp::variance_gradient(p.attractor, x));
}

Modulated modulate(const Vec3& displacement, const Vec3& stiffness,
                   const Vec3& stabilization, double variance,
                   double sigma_max, const PolicyConfig& c) {
  Modulated out;
  const double limit = c.attractor_limit;
  for (int d = 0; d < 3; ++d) {
    const double k = stiffness[d];
    const double f = k * displacement[d] + stabilization[d];
    if (!c.bounded_attractor) {
      out.displacement[d] = k > kTiny ? f / k : 0.0;
      out.stiffness[d] = k;
    } else if (k > kTiny && std::abs(f) / k <= limit) {
      out.displacement[d] = f / k;
      out.stiffness[d] = k;
    } else {
      out.displacement[d] = f == 0.0 ? 0.0 : sign(f) * limit;
      out.stiffness[d] = std::min(std::abs(f) / limit, c.stiffness_max);
    }
  }
  const double rel = sigma_max > 0.0 ? variance / sigma_max : 1.0;
  if (rel > c.uncertainty_threshold) {
    const double scale =
        std::max(0.0, (1.0 - rel) / (1.0 - c.uncertainty_threshold));
    out.stiffness *= scale;
  }
  return out;
}

ControlCommand query(const PolicyState& p, const Vec3& x) {
  ControlCommand cmd;
  cmd.origin = x;
  if (p.empty()) return cmd;
  const gp::PredictionWithGradient pg = gp::predict_with_gradient(p.attractor, x);
  const Vec3 stiffness = raw_stiffness(p, x);
  cmd.variance = pg.prediction.variance;
  cmd.variance_rel = cmd.variance / p.sigma_max();
  cmd.stabilization_force = stabilization_from_gradient(p, pg.variance_gradient);
  const Modulated m = modulate(pg.prediction.mean, stiffness,
                               cmd.stabilization_force, cmd.variance,
                               p.sigma_max(), p.config);
  cmd.attractor_displacement = m.displacement;
  cmd.stiffness = m.stiffness;
  return cmd;
}

}  // namespace ilosa::policy
