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

#include "ilosa/gp/kernel.hpp"

#include <cmath>
#include <string>

#include "ilosa/common.hpp"

namespace ilosa::gp {

namespace {

void check_dim(Eigen::Index got, const Hyperparameters& hyper,
               const char* what) {
  if (got != hyper.dim()) {
    throw InvalidArgument(std::string(what) + ": input dimension " +
                          std::to_string(got) + " does not match " +
                          std::to_string(hyper.dim()) + " lengthscales");
  }
}

// Inlined row-vs-row evaluation used inside the hot loops.
inline double se(const Eigen::MatrixXd& p, Eigen::Index i,
                 const Eigen::MatrixXd& q, Eigen::Index j,
                 const Eigen::VectorXd& inv_l, double sf2) {
  double r2 = 0.0;
  for (Eigen::Index d = 0; d < p.cols(); ++d) {
    const double z = (p(i, d) - q(j, d)) * inv_l[d];
    r2 += z * z;
  }
  return sf2 * std::exp(-0.5 * r2);
}

}  // namespace

void Hyperparameters::validate() const {
  if (lengthscales.size() == 0) {
    throw InvalidArgument("hyperparameters: no lengthscales");
  }
  for (Eigen::Index d = 0; d < lengthscales.size(); ++d) {
    if (!(std::isfinite(lengthscales[d]) && lengthscales[d] > 0.0)) {
      throw InvalidArgument("hyperparameters: lengthscales must be > 0");
    }
  }
  if (!(std::isfinite(signal_variance) && signal_variance > 0.0)) {
    throw InvalidArgument("hyperparameters: signal variance must be > 0");
  }
  if (!(std::isfinite(noise_variance) && noise_variance >= 0.0)) {
    throw InvalidArgument("hyperparameters: noise variance must be >= 0");
  }
}

Hyperparameters Hyperparameters::isotropic(Eigen::Index dim, double lengthscale,
                                           double signal_variance,
                                           double noise_variance) {
  Hyperparameters h;
  h.lengthscales = Eigen::VectorXd::Constant(dim, lengthscale);
  h.signal_variance = signal_variance;
  h.noise_variance = noise_variance;
  return h;
}

bool operator==(const Hyperparameters& a, const Hyperparameters& b) {
  return a.lengthscales.size() == b.lengthscales.size() &&
         a.lengthscales == b.lengthscales &&
         a.signal_variance == b.signal_variance &&
         a.noise_variance == b.noise_variance;
}

double kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& a,
                   const Eigen::Ref<const Eigen::VectorXd>& b,
                   const Hyperparameters& hyper) {
  check_dim(a.size(), hyper, "kernel_eval");
  check_dim(b.size(), hyper, "kernel_eval");
  const Eigen::VectorXd z =
      (a - b).cwiseQuotient(hyper.lengthscales);
  return hyper.signal_variance * std::exp(-0.5 * z.squaredNorm());
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& points,
                              const Hyperparameters& hyper) {
  check_dim(points.cols(), hyper, "kernel_matrix");
  const Eigen::Index n = points.rows();
  const Eigen::VectorXd inv_l = hyper.lengthscales.cwiseInverse();
  const double sf2 = hyper.signal_variance;
  Eigen::MatrixXd k(n, n);
#pragma omp parallel for schedule(static) if (n > 64)
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = sf2;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      k(i, j) = se(points, i, points, j, inv_l, sf2);
    }
  }
  // Mirror the strict lower triangle (columns were filled independently).
  k.triangularView<Eigen::StrictlyUpper>() = k.transpose();
  return k;
}

Eigen::MatrixXd cross_covariance(const Eigen::MatrixXd& points,
                                 const Eigen::MatrixXd& queries,
                                 const Hyperparameters& hyper) {
  check_dim(points.cols(), hyper, "cross_covariance");
  check_dim(queries.cols(), hyper, "cross_covariance");
  const Eigen::Index n = points.rows();
  const Eigen::Index q = queries.rows();
  const Eigen::VectorXd inv_l = hyper.lengthscales.cwiseInverse();
  Eigen::MatrixXd k(n, q);
#pragma omp parallel for schedule(static) if (n * q > 4096)
  for (Eigen::Index j = 0; j < q; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      k(i, j) = se(points, i, queries, j, inv_l, hyper.signal_variance);
    }
  }
  return k;
}

Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& points,
                              const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Hyperparameters& hyper) {
  check_dim(points.cols(), hyper, "kernel_vector");
  check_dim(x.size(), hyper, "kernel_vector");
  const Eigen::Index n = points.rows();
  const Eigen::VectorXd inv_l = hyper.lengthscales.cwiseInverse();
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (Eigen::Index d = 0; d < points.cols(); ++d) {
      const double z = (points(i, d) - x[d]) * inv_l[d];
      r2 += z * z;
    }
    k[i] = hyper.signal_variance * std::exp(-0.5 * r2);
  }
  return k;
}

namespace reference {

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& points,
                              const Hyperparameters& hyper) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k(i, j) = kernel_eval(points.row(i).transpose(),
                            points.row(j).transpose(), hyper);
    }
  }
  return k;
}

Eigen::MatrixXd cross_covariance(const Eigen::MatrixXd& points,
                                 const Eigen::MatrixXd& queries,
                                 const Hyperparameters& hyper) {
  Eigen::MatrixXd k(points.rows(), queries.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < queries.rows(); ++j) {
      k(i, j) = kernel_eval(points.row(i).transpose(),
                            queries.row(j).transpose(), hyper);
    }
  }
  return k;
}

}  // namespace reference

}  // namespace ilosa::gp
