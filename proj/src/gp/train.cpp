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

#include "ilosa/gp/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <ceres/ceres.h>
#include <Eigen/Cholesky>

#include "ilosa/common.hpp"

namespace ilosa::gp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Sum over i, j of q_ij * w_ij where w is the derivative of K w.r.t. one
// log-hyperparameter. Parallel over columns.
Eigen::VectorXd trace_terms(const Eigen::MatrixXd& q,
                            const Eigen::MatrixXd& kf,
                            const Eigen::MatrixXd& inputs,
                            const Hyperparameters& hyper) {
  const Eigen::Index n = inputs.rows();
  const Eigen::Index dim = inputs.cols();
  const Eigen::VectorXd inv_l2 = hyper.lengthscales.array().square().inverse();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim + 2);
#pragma omp parallel if (n > 64)
  {
    Eigen::VectorXd local = Eigen::VectorXd::Zero(dim + 2);
#pragma omp for schedule(static) nowait
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double qk = q(i, j) * kf(i, j);
        for (Eigen::Index d = 0; d < dim; ++d) {
          const double diff = inputs(i, d) - inputs(j, d);
          local[d] += qk * diff * diff * inv_l2[d];
        }
        local[dim] += qk;
      }
    }
#pragma omp critical
    out += local;
  }
  out[dim + 1] = hyper.noise_variance * q.trace();
  return out;
}

// Maps between the box-bounded hyperparameters and the unconstrained
// optimizer variables: log(theta) = log(lo) + (log(hi) - log(lo)) s(u).
struct Transform {
  Eigen::VectorXd log_lo, log_hi;
  Eigen::Index dim;
  bool optimize_noise;
  double fixed_noise;

  Transform(const HyperBounds& b, Eigen::Index d, bool noise, double sn2)
      : log_lo(d + 2), log_hi(d + 2), dim(d), optimize_noise(noise),
        fixed_noise(sn2) {
    log_lo.head(d).setConstant(std::log(b.lengthscale_min));
    log_hi.head(d).setConstant(std::log(b.lengthscale_max));
    log_lo[d] = std::log(b.signal_variance_min);
    log_hi[d] = std::log(b.signal_variance_max);
    log_lo[d + 1] = std::log(b.noise_variance_min);
    log_hi[d + 1] = std::log(b.noise_variance_max);
  }

  int size() const { return static_cast<int>(dim + (optimize_noise ? 2 : 1)); }

  static double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

  Hyperparameters decode(const double* u) const {
    Hyperparameters h;
    h.lengthscales.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) h.lengthscales[i] = value(i, u[i]);
    h.signal_variance = value(dim, u[dim]);
    h.noise_variance = optimize_noise ? value(dim + 1, u[dim + 1]) : fixed_noise;
    return h;
  }

  // d log(theta_i) / d u_i
  double dlog(Eigen::Index i, double u) const {
    const double s = sigmoid(u);
    return (log_hi[i] - log_lo[i]) * s * (1.0 - s);
  }

  double value(Eigen::Index i, double u) const {
    return std::exp(log_lo[i] + (log_hi[i] - log_lo[i]) * sigmoid(u));
  }

  double encode_one(Eigen::Index i, double theta) const {
    const double span = log_hi[i] - log_lo[i];
    double s = (std::log(theta) - log_lo[i]) / span;
    s = std::clamp(s, 1e-6, 1.0 - 1e-6);
    return std::log(s / (1.0 - s));
  }

  std::vector<double> encode(const Hyperparameters& h) const {
    std::vector<double> u(static_cast<size_t>(size()));
    for (Eigen::Index i = 0; i < dim; ++i) u[i] = encode_one(i, h.lengthscales[i]);
    u[dim] = encode_one(dim, h.signal_variance);
    if (optimize_noise) u[dim + 1] = encode_one(dim + 1, h.noise_variance);
    return u;
  }
};

class NegativeLogLikelihood final : public ceres::FirstOrderFunction {
 public:
  NegativeLogLikelihood(const Eigen::MatrixXd& inputs,
                        const Eigen::MatrixXd& targets,
                        const Eigen::VectorXd& prior_mean,
                        const Transform& transform)
      : inputs_(inputs), targets_(targets), prior_mean_(prior_mean),
        transform_(transform) {}

  bool Evaluate(const double* u, double* cost, double* gradient) const override {
    const Hyperparameters h = transform_.decode(u);
    Eigen::VectorXd g;
    const double lml = log_marginal_likelihood(inputs_, targets_, prior_mean_, h,
                                               gradient ? &g : nullptr);
    if (!std::isfinite(lml)) return false;
    *cost = -lml;
    if (gradient) {
      for (int i = 0; i < transform_.size(); ++i) {
        gradient[i] = -g[i] * transform_.dlog(i, u[i]);
      }
    }
    return true;
  }

  int NumParameters() const override { return transform_.size(); }

 private:
  const Eigen::MatrixXd& inputs_;
  const Eigen::MatrixXd& targets_;
  const Eigen::VectorXd& prior_mean_;
  const Transform& transform_;
};

}  // namespace

double log_marginal_likelihood(const Eigen::MatrixXd& inputs,
                               const Eigen::MatrixXd& targets,
                               const Eigen::VectorXd& prior_mean,
                               const Hyperparameters& hyper,
                               Eigen::VectorXd* gradient) {
  const Eigen::Index n = inputs.rows();
  const Eigen::Index m = targets.cols();
  const Eigen::MatrixXd kf = kernel_matrix(inputs, hyper);
  Eigen::MatrixXd k = kf;
  k.diagonal().array() += hyper.noise_variance;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return kNegInf;
  const Eigen::MatrixXd centered = targets.rowwise() - prior_mean.transpose();
  const Eigen::MatrixXd alpha = llt.solve(centered);
  const double log_det =
      2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double fit_term = (centered.array() * alpha.array()).sum();
  const double lml = -0.5 * fit_term - 0.5 * static_cast<double>(m) * log_det -
                     0.5 * static_cast<double>(n * m) *
                         std::log(2.0 * std::numbers::pi);
  if (!std::isfinite(lml)) return kNegInf;
  if (gradient) {
    // dLML/dtheta = 1/2 tr((alpha alpha^T - M K^-1) dK/dtheta)
    Eigen::MatrixXd q = alpha * alpha.transpose();
    q -= static_cast<double>(m) *
         llt.solve(Eigen::MatrixXd::Identity(n, n));
    *gradient = 0.5 * trace_terms(q, kf, inputs, hyper);
  }
  return lml;
}

namespace reference {

Eigen::VectorXd log_marginal_likelihood_gradient(
    const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
    const Eigen::VectorXd& prior_mean, const Hyperparameters& hyper) {
  const Eigen::Index n = inputs.rows();
  const Eigen::Index dim = inputs.cols();
  const Eigen::Index m = targets.cols();
  const Eigen::MatrixXd kf = gp::reference::kernel_matrix(inputs, hyper);
  Eigen::MatrixXd k = kf;
  k.diagonal().array() += hyper.noise_variance;
  const Eigen::MatrixXd kinv = k.inverse();
  const Eigen::MatrixXd centered = targets.rowwise() - prior_mean.transpose();
  const Eigen::MatrixXd alpha = kinv * centered;
  const Eigen::MatrixXd q =
      alpha * alpha.transpose() - static_cast<double>(m) * kinv;
  Eigen::VectorXd g(dim + 2);
  for (Eigen::Index d = 0; d < dim; ++d) {
    Eigen::MatrixXd dk(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double diff = inputs(i, d) - inputs(j, d);
        dk(i, j) = kf(i, j) * diff * diff /
                   (hyper.lengthscales[d] * hyper.lengthscales[d]);
      }
    }
    g[d] = 0.5 * (q * dk).trace();
  }
  g[dim] = 0.5 * (q * kf).trace();
  g[dim + 1] = 0.5 * hyper.noise_variance * q.trace();
  return g;
}

}  // namespace reference

GPModel train(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
              const Eigen::VectorXd& prior_mean,
              const Hyperparameters& init_hyper, const TrainOptions& options,
              TrainReport* report) {
  init_hyper.validate();
  if (inputs.rows() < 2) {
    throw InvalidArgument("train: at least two samples are required");
  }
  if (inputs.rows() != targets.rows() || inputs.cols() != init_hyper.dim() ||
      targets.cols() != prior_mean.size()) {
    throw InvalidArgument("train: inconsistent data dimensions");
  }

  const Transform transform(options.bounds, init_hyper.dim(),
                            options.optimize_noise, init_hyper.noise_variance);
  // The start point is the bounded projection of init_hyper; the fallback
  // compares against init_hyper itself.
  std::vector<double> u = transform.encode(init_hyper);
  const double init_lml =
      log_marginal_likelihood(inputs, targets, prior_mean, init_hyper);

  ceres::GradientProblem problem(
      new NegativeLogLikelihood(inputs, targets, prior_mean, transform));
  ceres::GradientProblemSolver::Options solver_options;
  solver_options.line_search_direction_type = ceres::LBFGS;
  solver_options.max_num_iterations = options.max_iterations;
  solver_options.logging_type = ceres::SILENT;
  solver_options.minimizer_progress_to_stdout = false;
  solver_options.function_tolerance = 1e-10;
  solver_options.gradient_tolerance = 1e-8;
  ceres::GradientProblemSolver::Summary summary;

  Hyperparameters best = init_hyper;
  double best_lml = init_lml;
  bool fell_back = true;
  double start_cost = 0.0;
  if (problem.Evaluate(u.data(), &start_cost, nullptr)) {
    ceres::Solve(solver_options, problem, u.data(), &summary);
    const Hyperparameters found = transform.decode(u.data());
    const double found_lml =
        log_marginal_likelihood(inputs, targets, prior_mean, found);
    if (std::isfinite(found_lml) && found_lml >= best_lml) {
      best = found;
      best_lml = found_lml;
      fell_back = false;
    }
  }
  if (report) {
    report->initial_log_likelihood = init_lml;
    report->final_log_likelihood = best_lml;
    report->iterations = static_cast<int>(summary.iterations.size());
    report->fell_back = fell_back;
  }
  return GPModel::build(inputs, targets, prior_mean, best);
}

}  // namespace ilosa::gp
