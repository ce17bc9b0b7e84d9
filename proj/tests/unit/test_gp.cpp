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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "ilosa/common.hpp"
#include "ilosa/gp/kernel.hpp"
#include "ilosa/gp/model.hpp"
#include "ilosa/gp/serialize.hpp"
#include "ilosa/gp/train.hpp"

namespace ilosa::gp {
namespace {

Hyperparameters hyper3(double l = 0.3, double sf2 = 1.0, double sn2 = 1e-3) {
  return Hyperparameters::isotropic(3, l, sf2, sn2);
}

GPModel small_model(int n = 12, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(n, 3), y(n, 2);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < 3; ++d) x(i, d) = u(rng);
    y(i, 0) = std::sin(3 * x(i, 0));
    y(i, 1) = x(i, 1) - x(i, 2);
  }
  return GPModel::build(x, y, Eigen::Vector2d(0.1, -0.2), hyper3());
}

TEST(Kernel, EvaluatesSquaredExponential) {
  Hyperparameters h;
  h.lengthscales = Eigen::Vector3d(0.5, 1.0, 2.0);
  h.signal_variance = 2.0;
  const Eigen::Vector3d a(0, 0, 0), b(0.5, 1.0, -2.0);
  // Each scaled component is 1 in magnitude: exponent -3/2.
  EXPECT_NEAR(kernel_eval(a, b, h), 2.0 * std::exp(-1.5), 1e-15);
  EXPECT_DOUBLE_EQ(kernel_eval(a, a, h), 2.0);
}

TEST(Kernel, ParallelMatchesSerialReference) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(70, 3);
  const Eigen::MatrixXd q = Eigen::MatrixXd::Random(33, 3);
  const auto h = hyper3(0.4, 1.3, 0.0);
  EXPECT_LE((kernel_matrix(x, h) - reference::kernel_matrix(x, h)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((cross_covariance(x, q, h) - reference::cross_covariance(x, q, h)).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(Kernel, RejectsBadHyperparameters) {
  auto h = hyper3();
  h.lengthscales[1] = 0.0;
  EXPECT_THROW(h.validate(), InvalidArgument);
  h = hyper3();
  h.noise_variance = -1.0;
  EXPECT_THROW(h.validate(), InvalidArgument);
}

TEST(Model, PosteriorMatchesDenseSolve) {
  const GPModel m = small_model();
  const Eigen::Vector3d q(0.4, 0.5, 0.6);
  const auto& h = m.hyper();
  Eigen::MatrixXd k = reference::kernel_matrix(m.inputs(), h);
  k.diagonal().array() += h.noise_variance + m.factorization().jitter;
  const Eigen::VectorXd ks = reference::cross_covariance(m.inputs(), q.transpose(), h).col(0);
  const Eigen::MatrixXd centered = m.targets().rowwise() - m.prior_mean().transpose();
  const Eigen::VectorXd w = k.ldlt().solve(ks);
  const Eigen::VectorXd mean = m.prior_mean() + centered.transpose() * w;
  const double var = h.signal_variance - ks.dot(w);

  const Prediction p = predict(m, q);
  EXPECT_LE((p.mean - mean).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(p.variance, var, 1e-10);
  EXPECT_LE((p.weights.transpose() - w).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((predict_mean(m, q) - mean).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Model, FarQueryReturnsPrior) {
  const GPModel m = small_model();
  const Prediction p = predict(m, Eigen::Vector3d(50, 50, 50));
  EXPECT_LE((p.mean - m.prior_mean()).norm(), 1e-12);
  EXPECT_NEAR(p.variance, m.hyper().signal_variance, 1e-12);
}

TEST(Model, CorrectionShiftsMeanByEpsilon) {
  const GPModel m = small_model();
  const Eigen::Vector3d x = m.inputs().row(3).transpose() + Eigen::Vector3d(0.02, -0.01, 0.0);
  const Eigen::Vector2d eps(0.05, -0.1);
  const GPModel c = correct_labels(m, x, eps);
  EXPECT_LE((predict_mean(c, x) - predict_mean(m, x) - eps).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(c.size(), m.size());
  EXPECT_TRUE(c.shares_factorization(m));
  // The original value is untouched.
  EXPECT_EQ(m.targets(), small_model().targets());
}

TEST(Model, CorrectionFarFromDataIsUndefined) {
  const GPModel m = small_model();
  EXPECT_THROW(correct_labels(m, Eigen::Vector3d(80, 80, 80), Eigen::Vector2d(1, 1)),
               CorrectionUndefined);
}

TEST(Model, AppendMatchesRebuild) {
  const GPModel m = small_model();
  const Eigen::Vector3d x(0.9, 0.1, 0.3);
  const Eigen::Vector2d y(0.4, 0.2);
  const GPModel grown = append(m, x, y);
  Eigen::MatrixXd xs(m.size() + 1, 3), ys(m.size() + 1, 2);
  xs << m.inputs(), x.transpose();
  ys << m.targets(), y.transpose();
  const GPModel rebuilt = GPModel::build(xs, ys, m.prior_mean(), m.hyper());
  ASSERT_EQ(grown.size(), m.size() + 1);
  const Eigen::Vector3d q(0.5, 0.2, 0.4);
  EXPECT_LE((predict_mean(grown, q) - predict_mean(rebuilt, q)).norm(), 1e-10);
  EXPECT_NEAR(predict(grown, q).variance, predict(rebuilt, q).variance, 1e-10);
}

TEST(Model, AppendDuplicateOverwrites) {
  const GPModel m = small_model();
  const Eigen::Vector3d x = m.inputs().row(2).transpose();
  const GPModel out = append(m, x, Eigen::Vector2d(7, 8));
  EXPECT_EQ(out.size(), m.size());
  EXPECT_EQ(out.targets()(2, 0), 7.0);
  EXPECT_EQ(find_duplicate(m, x), 2);
}

TEST(Model, VarianceGradientMatchesFiniteDifference) {
  const GPModel m = small_model(20, 4);
  const Eigen::Vector3d x(0.45, 0.55, 0.5);
  const Eigen::VectorXd g = variance_gradient(m, x);
  const double h = 1e-6;
  for (int d = 0; d < 3; ++d) {
    Eigen::Vector3d xp = x, xm = x;
    xp[d] += h;
    xm[d] -= h;
    const double fd = (predict(m, xp).variance - predict(m, xm).variance) / (2 * h);
    EXPECT_NEAR(g[d], fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
  const auto both = predict_with_gradient(m, x);
  EXPECT_LE((both.variance_gradient - g).norm(), 1e-12);
}

TEST(Train, LikelihoodGradientMatchesReferenceAndFiniteDifference) {
  const GPModel m = small_model(25, 5);
  Eigen::VectorXd grad;
  const double ll = log_marginal_likelihood(m.inputs(), m.targets(), m.prior_mean(), m.hyper(), &grad);
  const Eigen::VectorXd ref = reference::log_marginal_likelihood_gradient(
      m.inputs(), m.targets(), m.prior_mean(), m.hyper());
  EXPECT_LE((grad - ref).norm(), 1e-8 * std::max(1.0, ref.norm()));
  EXPECT_TRUE(std::isfinite(ll));

  // Finite difference in log-space.
  auto at = [&](int i, double delta) {
    Hyperparameters h = m.hyper();
    if (i < 3) h.lengthscales[i] *= std::exp(delta);
    if (i == 3) h.signal_variance *= std::exp(delta);
    if (i == 4) h.noise_variance *= std::exp(delta);
    return log_marginal_likelihood(m.inputs(), m.targets(), m.prior_mean(), h);
  };
  for (int i = 0; i < 5; ++i) {
    const double fd = (at(i, 1e-6) - at(i, -1e-6)) / 2e-6;
    EXPECT_NEAR(grad[i], fd, 1e-4 * std::max(1.0, std::abs(fd)));
  }
}

TEST(Train, OptimizerDoesNotDecreaseLikelihood) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.05);
  Eigen::MatrixXd x = (Eigen::MatrixXd::Random(60, 3).array() + 1.0) * 0.5;
  Eigen::MatrixXd y(60, 1);
  for (int i = 0; i < 60; ++i) y(i, 0) = std::sin(4 * x(i, 0)) + noise(rng);
  const auto h0 = hyper3(1.0, 0.2, 0.1);
  TrainReport report;
  const GPModel m = train(x, y, Eigen::VectorXd::Zero(1), h0, {}, &report);
  EXPECT_GE(report.final_log_likelihood, report.initial_log_likelihood);
  EXPECT_NO_THROW(m.hyper().validate());
  EXPECT_EQ(m.size(), 60);
}

TEST(Serialize, ModelRoundTripReproducesPredictions) {
  const GPModel m = small_model();
  const GPModel back = model_from_json(nlohmann::json::parse(to_json(m).dump()));
  const Eigen::Vector3d q(0.3, 0.3, 0.7);
  EXPECT_EQ(predict_mean(back, q), predict_mean(m, q));
  EXPECT_EQ(predict(back, q).variance, predict(m, q).variance);
}

}  // namespace
}  // namespace ilosa::gp
