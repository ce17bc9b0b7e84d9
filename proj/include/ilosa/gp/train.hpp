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

#include <Eigen/Core>

#include "ilosa/gp/kernel.hpp"
#include "ilosa/gp/model.hpp"

namespace ilosa::gp {

// Box bounds on the hyperparameters, in natural units. The optimizer works
// on a smooth unconstrained reparametrisation of the log-values, so the
// bounds are never violated.
struct HyperBounds {
  double lengthscale_min = 1e-4;
  double lengthscale_max = 1e4;
  double signal_variance_min = 1e-12;
  double signal_variance_max = 1e12;
  double noise_variance_min = 1e-14;
  double noise_variance_max = 1e6;
};

struct TrainOptions {
  HyperBounds bounds;
  int max_iterations = 200;
  bool optimize_noise = true;
};

struct TrainReport {
  double initial_log_likelihood = 0.0;
  double final_log_likelihood = 0.0;
  int iterations = 0;
  // Set when the optimizer failed and the initial hyperparameters were kept.
  bool fell_back = false;
};

// Log marginal likelihood summed over output columns (shared kernel).
// Returns -inf when the covariance is not positive definite.
double log_marginal_likelihood(const Eigen::MatrixXd& inputs,
                               const Eigen::MatrixXd& targets,
                               const Eigen::VectorXd& prior_mean,
                               const Hyperparameters& hyper,
                               Eigen::VectorXd* gradient = nullptr);

// Gradient layout used by log_marginal_likelihood: d/dlog(l_1..l_D),
// d/dlog(sf2), d/dlog(sn2).
namespace reference {
Eigen::VectorXd log_marginal_likelihood_gradient(
    const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
    const Eigen::VectorXd& prior_mean, const Hyperparameters& hyper);
}

// Maximizes the log marginal likelihood with L-BFGS starting from
// `init_hyper` and returns the fitted model. Never returns hyperparameters
// with a lower likelihood than `init_hyper`.
GPModel train(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
              const Eigen::VectorXd& prior_mean,
              const Hyperparameters& init_hyper,
              const TrainOptions& options = {},
              TrainReport* report = nullptr);

}  // namespace ilosa::gp
