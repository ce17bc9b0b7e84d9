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

namespace ilosa::gp {

// Squared-exponential kernel with one lengthscale per input dimension.
struct Hyperparameters {
  Eigen::VectorXd lengthscales;
  double signal_variance = 1.0;
  double noise_variance = 0.0;

  Eigen::Index dim() const { return lengthscales.size(); }
  double max_lengthscale() const { return lengthscales.maxCoeff(); }

  // Throws InvalidArgument unless lengthscales > 0, signal variance > 0 and
  // noise variance >= 0 (all finite).
  void validate() const;

  static Hyperparameters isotropic(Eigen::Index dim, double lengthscale,
                                   double signal_variance,
                                   double noise_variance);
};

bool operator==(const Hyperparameters& a, const Hyperparameters& b);

// k(a, b) = sf2 * exp(-1/2 * sum_d ((a_d - b_d) / l_d)^2)
double kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& a,
                   const Eigen::Ref<const Eigen::VectorXd>& b,
                   const Hyperparameters& hyper);

// Rows of `points` are samples. Both kernels below are OpenMP-parallel over
// rows; the `reference` namespace keeps plain serial loops that the tests and
// the benchmark compare against.

// Noise-free Gram matrix K(X, X).
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& points,
                              const Hyperparameters& hyper);

// Cross covariance K(X, Q), shape |X| x |Q|.
Eigen::MatrixXd cross_covariance(const Eigen::MatrixXd& points,
                                 const Eigen::MatrixXd& queries,
                                 const Hyperparameters& hyper);

// Covariance vector k(X, x) for a single query.
Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& points,
                              const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Hyperparameters& hyper);

namespace reference {

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& points,
                              const Hyperparameters& hyper);
Eigen::MatrixXd cross_covariance(const Eigen::MatrixXd& points,
                                 const Eigen::MatrixXd& queries,
                                 const Hyperparameters& hyper);

}  // namespace reference

}  // namespace ilosa::gp
