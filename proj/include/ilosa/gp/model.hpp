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

#include <memory>

#include <Eigen/Core>

#include "ilosa/gp/kernel.hpp"

namespace ilosa::gp {

// Lower Cholesky factor of K(X, X) + (noise + jitter) I. Shared between
// models built on the same inputs and hyperparameters; never mutated once
// published.
struct Factorization {
  Eigen::MatrixXd lower;
  double jitter = 0.0;  // absolute amount added to the diagonal
};

struct Prediction {
  Eigen::VectorXd mean;     // M outputs
  double variance = 0.0;    // latent variance, in [0, signal_variance]
  Eigen::RowVectorXd weights;  // A(X, x) = k*^T (K + sn2 I)^-1
};

// Exact GP regression with a constant prior mean. Instances are values: the
// operations below never modify their argument and return a new model.
// Inputs are stored one sample per row (n x D), targets likewise (n x M).
class GPModel {
 public:
  GPModel() = default;

  // Factorizes from scratch. Throws NumericalFailure when the covariance
  // cannot be made positive definite by the jitter ladder. The ladder starts
  // at `min_jitter` (absolute), which lets a reloaded model reproduce the
  // factor it was saved with.
  static GPModel build(Eigen::MatrixXd inputs, Eigen::MatrixXd targets,
                       Eigen::VectorXd prior_mean, Hyperparameters hyper,
                       double min_jitter = 0.0);

  // A model that shares `like`'s inputs, hyperparameters and factorization
  // but carries its own targets and prior mean.
  static GPModel with_targets(const GPModel& like, Eigen::MatrixXd targets,
                              Eigen::VectorXd prior_mean);

  bool empty() const { return inputs_.rows() == 0; }
  Eigen::Index size() const { return inputs_.rows(); }
  Eigen::Index input_dim() const { return inputs_.cols(); }
  Eigen::Index output_dim() const { return targets_.cols(); }

  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::MatrixXd& targets() const { return targets_; }
  const Eigen::VectorXd& prior_mean() const { return prior_mean_; }
  const Hyperparameters& hyper() const { return hyper_; }
  const Factorization& factorization() const { return *factor_; }
  bool shares_factorization(const GPModel& other) const {
    return factor_ == other.factor_;
  }

  // (K + sn2 I)^-1 (Y - m), n x M.
  const Eigen::MatrixXd& alpha() const { return alpha_; }

 private:
  friend GPModel fit(const GPModel&, const Eigen::MatrixXd&,
                     const Eigen::MatrixXd&);
  friend GPModel append(const GPModel&, const Eigen::VectorXd&,
                        const Eigen::VectorXd&);
  friend GPModel correct_labels(const GPModel&, const Eigen::VectorXd&,
                                const Eigen::VectorXd&, double);

  void refresh_alpha();

  Eigen::MatrixXd inputs_;
  Eigen::MatrixXd targets_;
  Eigen::VectorXd prior_mean_;
  Hyperparameters hyper_;
  std::shared_ptr<const Factorization> factor_;
  Eigen::MatrixXd alpha_;
};

// Rebuilds the factorization for new data under the model's current
// hyperparameters. When `inputs` extends the model's inputs by trailing rows
// the existing factor is grown row by row instead of recomputed.
GPModel fit(const GPModel& model, const Eigen::MatrixXd& inputs,
            const Eigen::MatrixXd& targets);

Prediction predict(const GPModel& model, const Eigen::VectorXd& x);

// Mean only; O(n) per query.
Eigen::VectorXd predict_mean(const GPModel& model, const Eigen::VectorXd& x);

// Gradient of the latent variance with respect to the query point.
Eigen::VectorXd variance_gradient(const GPModel& model,
                                  const Eigen::VectorXd& x);

// predict() and variance_gradient() sharing one pair of triangular solves.
struct PredictionWithGradient {
  Prediction prediction;
  Eigen::VectorXd variance_gradient;
};
PredictionWithGradient predict_with_gradient(const GPModel& model,
                                             const Eigen::VectorXd& x);

inline constexpr double kCorrectionTolerance = 1e-8;

// y <- y + A^+ eps, A^+ = A^T / (A A^T). Throws CorrectionUndefined when
// ||A|| <= tolerance.
GPModel correct_labels(const GPModel& model, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& eps,
                       double tolerance = kCorrectionTolerance);

inline constexpr double kDuplicateTolerance = 1e-9;

// Adds one sample. An input within kDuplicateTolerance of an existing one
// overwrites that sample's target instead.
GPModel append(const GPModel& model, const Eigen::VectorXd& x,
               const Eigen::VectorXd& y);

// Index of an existing input within kDuplicateTolerance of x, or -1.
Eigen::Index find_duplicate(const GPModel& model, const Eigen::VectorXd& x);

}  // namespace ilosa::gp
