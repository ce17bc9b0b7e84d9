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

#include "ilosa/gp/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "ilosa/common.hpp"

namespace ilosa::gp {

namespace {

// Jitter ladder, relative to the signal variance so that it scales with the
// output units of the model.
constexpr std::array<double, 6> kJitterLadder = {0.0,  1e-10, 1e-9,
                                                 1e-8, 1e-7,  1e-6};

// Smallest admissible squared pivot, relative to sf2 + sn2.
constexpr double kMinPivot = 1e-13;

double min_pivot(const Hyperparameters& h) {
  return kMinPivot * (h.signal_variance + h.noise_variance);
}

std::shared_ptr<const Factorization> factorize(const Eigen::MatrixXd& inputs,
                                               const Hyperparameters& hyper,
                                               double start_jitter = 0.0) {
  const Eigen::MatrixXd gram = kernel_matrix(inputs, hyper);
  const double floor = min_pivot(hyper);
  std::vector<double> ladder;
  if (start_jitter > 0.0) ladder.push_back(start_jitter);
  for (double rel : kJitterLadder) {
    if (rel * hyper.signal_variance > start_jitter) {
      ladder.push_back(rel * hyper.signal_variance);
    } else if (rel == 0.0 && start_jitter == 0.0) {
      ladder.push_back(0.0);
    }
  }
  for (double jitter : ladder) {
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += hyper.noise_variance + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd lower = llt.matrixL();
    if (lower.diagonal().array().square().minCoeff() < floor) continue;
    auto f = std::make_shared<Factorization>();
    f->lower = std::move(lower);
    f->jitter = jitter;
    return f;
  }
  throw NumericalFailure("GP covariance is not positive definite after jitter "
                         "escalation (n=" +
                         std::to_string(inputs.rows()) + ")");
}

// Grows an existing factor by the trailing rows of `inputs`. Returns null when
// a new pivot falls below the admissible floor; the caller then rebuilds.
std::shared_ptr<const Factorization> grow(const Factorization& old,
                                          const Eigen::MatrixXd& inputs,
                                          Eigen::Index old_n,
                                          const Hyperparameters& hyper) {
  const Eigen::Index n = inputs.rows();
  auto f = std::make_shared<Factorization>();
  f->jitter = old.jitter;
  f->lower = Eigen::MatrixXd::Zero(n, n);
  f->lower.topLeftCorner(old_n, old_n) = old.lower;
  const double diag = hyper.signal_variance + hyper.noise_variance + old.jitter;
  const double floor = min_pivot(hyper);
  for (Eigen::Index r = old_n; r < n; ++r) {
    const Eigen::VectorXd k = kernel_vector(inputs.topRows(r),
                                            inputs.row(r).transpose(), hyper);
    Eigen::VectorXd l = k;
    if (r > 0) {
      f->lower.topLeftCorner(r, r)
          .triangularView<Eigen::Lower>()
          .solveInPlace(l);
    }
    const double d2 = diag - l.squaredNorm();
    if (!(d2 >= floor)) return nullptr;
    f->lower.row(r).head(r) = l.transpose();
    f->lower(r, r) = std::sqrt(d2);
  }
  return f;
}

void check_query(const GPModel& model, const Eigen::VectorXd& x,
                 const char* what) {
  if (model.empty()) {
    throw InvalidArgument(std::string(what) + ": model has no data");
  }
  if (x.size() != model.input_dim()) {
    throw InvalidArgument(std::string(what) + ": query dimension " +
                          std::to_string(x.size()) + " != " +
                          std::to_string(model.input_dim()));
  }
}

void check_data(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                const Eigen::VectorXd& prior_mean,
                const Hyperparameters& hyper) {
  hyper.validate();
  if (inputs.rows() < 1) throw InvalidArgument("GP needs at least one sample");
  if (inputs.rows() != targets.rows()) {
    throw InvalidArgument("GP inputs and targets differ in length");
  }
  if (inputs.cols() != hyper.dim()) {
    throw InvalidArgument("GP input dimension does not match lengthscales");
  }
  if (targets.cols() != prior_mean.size()) {
    throw InvalidArgument("GP output dimension does not match prior mean");
  }
  if (!inputs.allFinite() || !targets.allFinite()) {
    throw InvalidArgument("GP data contains non-finite values");
  }
}

struct Solves {
  Eigen::VectorXd k;  // k(X, x)
  Eigen::VectorXd w;  // L^-1 k
  Eigen::VectorXd v;  // (K + sn2 I)^-1 k
};

Solves solve_at(const GPModel& model, const Eigen::VectorXd& x) {
  Solves s;
  s.k = kernel_vector(model.inputs(), x, model.hyper());
  const auto lower = model.factorization().lower.triangularView<Eigen::Lower>();
  s.w = lower.solve(s.k);
  s.v = lower.transpose().solve(s.w);
  return s;
}

Prediction prediction_from(const GPModel& model, const Solves& s) {
  Prediction p;
  p.mean = model.prior_mean() + model.alpha().transpose() * s.k;
  const double sf2 = model.hyper().signal_variance;
  p.variance = std::clamp(sf2 - s.w.squaredNorm(), 0.0, sf2);
  p.weights = s.v.transpose();
  return p;
}

Eigen::VectorXd gradient_from(const GPModel& model, const Eigen::VectorXd& x,
                              const Solves& s) {
  const Eigen::MatrixXd& xi = model.inputs();
  const Eigen::VectorXd inv_l2 =
      model.hyper().lengthscales.array().square().inverse();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index i = 0; i < xi.rows(); ++i) {
    const double c = 2.0 * s.v[i] * s.k[i];
    g += c * (x - xi.row(i).transpose()).cwiseProduct(inv_l2);
  }
  return g;
}

}  // namespace

void GPModel::refresh_alpha() {
  Eigen::MatrixXd centered = targets_.rowwise() - prior_mean_.transpose();
  const auto lower = factor_->lower.triangularView<Eigen::Lower>();
  lower.solveInPlace(centered);
  lower.transpose().solveInPlace(centered);
  alpha_ = std::move(centered);
}

GPModel GPModel::build(Eigen::MatrixXd inputs, Eigen::MatrixXd targets,
                       Eigen::VectorXd prior_mean, Hyperparameters hyper,
                       double min_jitter) {
  check_data(inputs, targets, prior_mean, hyper);
  GPModel m;
  m.factor_ = factorize(inputs, hyper, min_jitter);
  m.inputs_ = std::move(inputs);
  m.targets_ = std::move(targets);
  m.prior_mean_ = std::move(prior_mean);
  m.hyper_ = std::move(hyper);
  m.refresh_alpha();
  return m;
}

GPModel GPModel::with_targets(const GPModel& like, Eigen::MatrixXd targets,
                              Eigen::VectorXd prior_mean) {
  check_data(like.inputs_, targets, prior_mean, like.hyper_);
  GPModel m;
  m.inputs_ = like.inputs_;
  m.hyper_ = like.hyper_;
  m.factor_ = like.factor_;
  m.targets_ = std::move(targets);
  m.prior_mean_ = std::move(prior_mean);
  m.refresh_alpha();
  return m;
}

GPModel fit(const GPModel& model, const Eigen::MatrixXd& inputs,
            const Eigen::MatrixXd& targets) {
  if (model.factor_ == nullptr) {
    throw InvalidArgument("fit: model has no hyperparameters yet");
  }
  check_data(inputs, targets, model.prior_mean_, model.hyper_);
  const Eigen::Index old_n = model.size();
  GPModel out;
  out.hyper_ = model.hyper_;
  out.prior_mean_ = model.prior_mean_;
  out.inputs_ = inputs;
  out.targets_ = targets;
  if (inputs.rows() >= old_n && inputs.cols() == model.input_dim() &&
      inputs.topRows(old_n) == model.inputs_) {
    out.factor_ = inputs.rows() == old_n
                      ? model.factor_
                      : grow(*model.factor_, inputs, old_n, model.hyper_);
  }
  if (out.factor_ == nullptr) out.factor_ = factorize(inputs, model.hyper_);
  out.refresh_alpha();
  return out;
}

Prediction predict(const GPModel& model, const Eigen::VectorXd& x) {
  check_query(model, x, "predict");
  return prediction_from(model, solve_at(model, x));
}

Eigen::VectorXd predict_mean(const GPModel& model, const Eigen::VectorXd& x) {
  check_query(model, x, "predict_mean");
  return model.prior_mean() +
         model.alpha().transpose() *
             kernel_vector(model.inputs(), x, model.hyper());
}

Eigen::VectorXd variance_gradient(const GPModel& model,
                                  const Eigen::VectorXd& x) {
  check_query(model, x, "variance_gradient");
  return gradient_from(model, x, solve_at(model, x));
}

PredictionWithGradient predict_with_gradient(const GPModel& model,
                                             const Eigen::VectorXd& x) {
  check_query(model, x, "predict_with_gradient");
  const Solves s = solve_at(model, x);
  return {prediction_from(model, s), gradient_from(model, x, s)};
}

GPModel correct_labels(const GPModel& model, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& eps, double tolerance) {
  check_query(model, x, "correct_labels");
  if (eps.size() != model.output_dim()) {
    throw InvalidArgument("correct_labels: correction has wrong dimension");
  }
  const Eigen::RowVectorXd a = solve_at(model, x).v.transpose();
  const double norm2 = a.squaredNorm();
  if (!(std::sqrt(norm2) > tolerance)) {
    throw CorrectionUndefined(
        "correct_labels: weight row vanishes at the query point");
  }
  GPModel out = model;
  out.targets_ += (a.transpose() / norm2) * eps.transpose();
  out.refresh_alpha();
  return out;
}

Eigen::Index find_duplicate(const GPModel& model, const Eigen::VectorXd& x) {
  for (Eigen::Index i = 0; i < model.size(); ++i) {
    if ((model.inputs().row(i).transpose() - x).norm() <= kDuplicateTolerance) {
      return i;
    }
  }
  return -1;
}

GPModel append(const GPModel& model, const Eigen::VectorXd& x,
               const Eigen::VectorXd& y) {
  check_query(model, x, "append");
  if (y.size() != model.output_dim()) {
    throw InvalidArgument("append: target has wrong dimension");
  }
  const Eigen::Index dup = find_duplicate(model, x);
  if (dup >= 0) {
    Eigen::MatrixXd targets = model.targets();
    targets.row(dup) = y.transpose();
    return fit(model, model.inputs(), targets);
  }
  Eigen::MatrixXd inputs(model.size() + 1, model.input_dim());
  inputs << model.inputs(), x.transpose();
  Eigen::MatrixXd targets(model.size() + 1, model.output_dim());
  targets << model.targets(), y.transpose();
  return fit(model, inputs, targets);
}

}  // namespace ilosa::gp
