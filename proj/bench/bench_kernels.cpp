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

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "ilosa/gp/kernel.hpp"
#include "ilosa/gp/train.hpp"
#include "ilosa/policy/field.hpp"
#include "ilosa/policy/policy.hpp"
#include "ilosa/teacher/demos.hpp"

namespace {

using ilosa::gp::Hyperparameters;

Eigen::MatrixXd random_points(Eigen::Index n) {
  Eigen::MatrixXd points = Eigen::MatrixXd::Random(n, 3) * 0.2;
  return points;
}

Hyperparameters hyper() {
  return Hyperparameters::isotropic(3, 0.05, 1e-4, 1e-6);
}

void BM_KernelMatrix(benchmark::State& state) {
  const auto points = random_points(state.range(0));
  const auto h = hyper();
  for (auto _ : state) benchmark::DoNotOptimize(ilosa::gp::kernel_matrix(points, h));
}

void BM_KernelMatrixSerial(benchmark::State& state) {
  const auto points = random_points(state.range(0));
  const auto h = hyper();
  for (auto _ : state)
    benchmark::DoNotOptimize(ilosa::gp::reference::kernel_matrix(points, h));
}

void BM_CrossCovariance(benchmark::State& state) {
  const auto points = random_points(state.range(0));
  const auto queries = random_points(2500);
  const auto h = hyper();
  for (auto _ : state)
    benchmark::DoNotOptimize(ilosa::gp::cross_covariance(points, queries, h));
}

void BM_CrossCovarianceSerial(benchmark::State& state) {
  const auto points = random_points(state.range(0));
  const auto queries = random_points(2500);
  const auto h = hyper();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ilosa::gp::reference::cross_covariance(points, queries, h));
}

void BM_LikelihoodGradient(benchmark::State& state) {
  const auto inputs = random_points(state.range(0));
  const Eigen::MatrixXd targets = Eigen::MatrixXd::Random(state.range(0), 3) * 1e-3;
  const Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  const auto h = hyper();
  Eigen::VectorXd grad;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ilosa::gp::log_marginal_likelihood(inputs, targets, mean, h, &grad));
}

void BM_LikelihoodGradientSerial(benchmark::State& state) {
  const auto inputs = random_points(state.range(0));
  const Eigen::MatrixXd targets = Eigen::MatrixXd::Random(state.range(0), 3) * 1e-3;
  const Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  const auto h = hyper();
  for (auto _ : state)
    benchmark::DoNotOptimize(ilosa::gp::reference::log_marginal_likelihood_gradient(
        inputs, targets, mean, h));
}

const ilosa::policy::PolicyState& demo_policy() {
  static const ilosa::policy::PolicyState policy = [] {
    auto demo = ilosa::teacher::scripted_demo("unplug", 1, 7);
    return ilosa::policy::init_from_demos({demo.trajectory},
                                          ilosa::policy::PolicyConfig{});
  }();
  return policy;
}

ilosa::policy::FieldSpec field_spec(int resolution) {
  ilosa::policy::FieldSpec spec;
  spec.slice_axis = 1;
  spec.lower = {-0.05, -0.05};
  spec.upper = {0.35, 0.3};
  spec.resolution = {resolution, resolution};
  return spec;
}

void BM_Field(benchmark::State& state) {
  const auto& policy = demo_policy();
  const auto spec = field_spec(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(ilosa::policy::evaluate_field(policy, spec));
}

void BM_FieldSerial(benchmark::State& state) {
  const auto& policy = demo_policy();
  const auto spec = field_spec(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(ilosa::policy::reference::evaluate_field(policy, spec));
}

}  // namespace

BENCHMARK(BM_KernelMatrix)->Arg(200)->Arg(800)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KernelMatrixSerial)->Arg(200)->Arg(800)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CrossCovariance)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossCovarianceSerial)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LikelihoodGradient)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LikelihoodGradientSerial)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Field)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FieldSerial)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
