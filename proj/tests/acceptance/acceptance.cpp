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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any failed. `--only N[,M...]` restricts the run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ilosa/gp/model.hpp"
#include "ilosa/policy/policy.hpp"
#include "ilosa/sim/simulator.hpp"
#include "ilosa/teacher/demos.hpp"
#include "ilosa/teacher/experiment.hpp"

namespace {

using namespace ilosa;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;  // <= 0: none
  std::function<Verdict()> run;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Random GP on n in [1, 50] points in the unit cube.
gp::GPModel random_model(std::mt19937_64& rng, int max_points = 50) {
  std::uniform_int_distribution<int> count(1, max_points);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = count(rng);
  Eigen::MatrixXd x(n, 3), y(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < 3; ++d) {
      x(i, d) = unit(rng);
      y(i, d) = normal(rng);
    }
  }
  gp::Hyperparameters h;
  h.lengthscales = Eigen::Vector3d(0.1 + 0.4 * unit(rng), 0.1 + 0.4 * unit(rng),
                                   0.1 + 0.4 * unit(rng));
  h.signal_variance = 0.5 + unit(rng);
  h.noise_variance = h.signal_variance * std::pow(10.0, -4.0 + 2.0 * unit(rng));
  Eigen::VectorXd mean(3);
  for (int d = 0; d < 3; ++d) mean[d] = 0.3 * normal(rng);
  return gp::GPModel::build(x, y, mean, h);
}

// A point within half a lengthscale of a random training input.
Eigen::VectorXd near_data(const gp::GPModel& m, std::mt19937_64& rng) {
  std::uniform_int_distribution<Eigen::Index> pick(0, m.size() - 1);
  std::uniform_real_distribution<double> offset(-0.5, 0.5);
  Eigen::VectorXd x = m.inputs().row(pick(rng)).transpose();
  for (int d = 0; d < 3; ++d) x[d] += offset(rng) * m.hyper().lengthscales[d];
  return x;
}

Verdict correction_exactness() {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const gp::GPModel m = random_model(rng);
    const Eigen::VectorXd x = near_data(m, rng);
    Eigen::VectorXd eps(3);
    for (int d = 0; d < 3; ++d) eps[d] = 0.1 * normal(rng);
    const Eigen::VectorXd before = gp::predict_mean(m, x);
    const Eigen::VectorXd after = gp::predict_mean(gp::correct_labels(m, x, eps), x);
    worst = std::max(worst, (after - before - eps).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-8, fmt("max |mu' - mu - eps| = %.3g", worst)};
}

Verdict variance_gradient() {
  std::mt19937_64 rng(22);
  double worst = 0.0;
  for (int model = 0; model < 20; ++model) {
    const gp::GPModel m = random_model(rng);
    for (int probe = 0; probe < 30; ++probe) {
      const Eigen::VectorXd x = near_data(m, rng);
      const Eigen::VectorXd g = gp::variance_gradient(m, x);
      Eigen::VectorXd fd(3);
      for (int d = 0; d < 3; ++d) {
        const double h = 1e-5 * m.hyper().lengthscales[d];
        Eigen::VectorXd xp = x, xm = x;
        xp[d] += h;
        xm[d] -= h;
        fd[d] = (gp::predict(m, xp).variance - gp::predict(m, xm).variance) / (2 * h);
      }
      // Scale floor: sf2 / l, the natural gradient magnitude of the model.
      const double scale =
          std::max(fd.norm(), 1e-3 * m.hyper().signal_variance / m.hyper().max_lengthscale());
      worst = std::max(worst, (g - fd).norm() / scale);
    }
  }
  return {worst < 1e-4, fmt("max relative error = %.3g", worst)};
}

Verdict modulation_algebra() {
  policy::PolicyConfig c;  // K_mean 300, limit 0.05, theta 0.9
  std::ostringstream out;
  bool ok = true;

  // Displacement 0.07 plus one device unit (0.01 m) wants 0.08.
  policy::FeedbackEvent ev;
  ev.increment = Vec3(1.0, 0.0, 0.0);
  const auto inc = policy::interpret_feedback(ev, Vec3(0.07, 0, 0), Vec3::Constant(300.0), c);
  const double k_inc = 300.0 * 0.08 / 0.05 - 300.0;
  ok &= std::abs(inc.stiffness.x() - k_inc) <= 1e-9 && std::abs(0.07 + inc.displacement.x() - 0.05) <= 1e-12;
  out << "K_inc=" << inc.stiffness.x();

  // f = 300 * 0.04 + 9 = 21 N exceeds K * limit = 15 N.
  const auto mod = policy::modulate(Vec3(0.04, 0, 0), Vec3::Constant(300.0), Vec3(9.0, 0, 0),
                                    0.0, 1.0, c);
  ok &= std::abs(mod.displacement.x() - 0.05) <= 1e-12 && std::abs(mod.stiffness.x() - 21.0 / 0.05) <= 1e-9;
  out << " dx_out=" << mod.displacement.x() << " K_out=" << mod.stiffness.x();

  const auto high = policy::modulate(Vec3(0.01, 0, 0), Vec3::Constant(300.0), Vec3::Zero(), 0.95,
                                     1.0, c);
  const double factor = high.stiffness.x() / 300.0;
  ok &= std::abs(factor - (1.0 - 0.95) / (1.0 - 0.9)) <= 1e-9;
  const auto top = policy::modulate(Vec3(0.01, 0, 0), Vec3::Constant(300.0), Vec3::Zero(), 1.0,
                                    1.0, c);
  ok &= top.stiffness.x() == 0.0;
  out << " factor(0.95)=" << factor;

  const double below =
      policy::modulate(Vec3(0.01, 0, 0), Vec3::Constant(300.0), Vec3::Zero(), 0.9 - 1e-9, 1.0, c)
          .stiffness.x();
  const double above =
      policy::modulate(Vec3(0.01, 0, 0), Vec3::Constant(300.0), Vec3::Zero(), 0.9 + 1e-9, 1.0, c)
          .stiffness.x();
  ok &= std::abs(below - above) <= 1e-4 * 300.0;
  out << " jump@theta=" << std::abs(below - above);
  return {ok, out.str()};
}

Verdict stabilization_ablation() {
  const auto table =
      teacher::run_experiment(teacher::default_preset("perturbed_goal_prior_ablation"), {false});
  const double with_mean = table.mean("goal_error_with_prior_m");
  const double without_mean = table.mean("goal_error_without_prior_m");
  const double with_max = table.max("goal_error_with_prior_m");
  const bool ok = table.seeds.size() == 5 && with_mean <= 0.3 * without_mean && with_max <= 0.05;
  std::ostringstream out;
  out << "mean with=" << with_mean << " m, without=" << without_mean << " m, max with=" << with_max
      << " m";
  return {ok, out.str()};
}

Verdict contact_loss() {
  const auto table =
      teacher::run_experiment(teacher::default_preset("box_contact_loss_ablation"), {false});
  const double worst = table.max("speed_ratio");
  const bool ok = table.seeds.size() == 5 && worst <= 0.5;
  return {ok, fmt("max peak-speed ratio bounded/unbounded = %.3f", worst)};
}

Verdict unplug() {
  const auto table = teacher::run_experiment(teacher::default_preset("unplug_single"), {false});
  bool ok = table.seeds.size() == 5;
  int released = 0;
  for (const auto& s : table.seeds) {
    released += s.values.at("breakaway") == 1.0;
    ok &= s.values.at("breakaway") == 1.0 && s.values.at("goal_error_m") < 0.03 &&
          s.values.at("data_efficiency_pct") >= 90.0;
  }
  std::ostringstream out;
  out << "max goal error=" << table.max("goal_error_m")
      << " m, min efficiency=" << table.min("data_efficiency_pct")
      << "%, breakaway in " << released << "/" << table.seeds.size() << " seeds";
  return {ok, out.str()};
}

Verdict wiping() {
  const auto cyclic = teacher::run_experiment(teacher::default_preset("wipe_cyclic"), {false});
  const auto obstacle = teacher::run_experiment(teacher::default_preset("wipe_obstacle"), {false});
  bool ok = !cyclic.seeds.empty() && !obstacle.seeds.empty();
  for (const auto& s : cyclic.seeds) {
    ok &= s.values.at("loops_completed") >= 5 && s.values.at("loop_consistency_m") <= 0.01 &&
          s.values.at("min_force_coverage") >= 0.95;
  }
  for (const auto& s : obstacle.seeds) {
    ok &= s.values.at("loops_completed") >= 5 && s.values.at("obstacle_ticks") == 0;
  }
  std::ostringstream out;
  out << "cyclic: max rmse=" << cyclic.max("loop_consistency_m")
      << " m, min coverage=" << cyclic.min("min_force_coverage")
      << "; obstacle: min loops=" << obstacle.min("loops_completed")
      << ", max obstacle ticks=" << obstacle.max("obstacle_ticks");
  return {ok, out.str()};
}

policy::ControlCommand fixed_command(const Vec3& attractor, const Vec3& stiffness) {
  policy::ControlCommand cmd;
  cmd.origin = attractor;
  cmd.stiffness = stiffness;
  return cmd;
}

Verdict simulator_fidelity() {
  std::ostringstream out;
  sim::Environment free_env;
  sim::SimParams params;
  params.mass = Vec3::Constant(1.5);

  // Release from x0 at rest towards a fixed attractor, critical damping:
  // x(t) = x0 (1 + w t) exp(-w t), w = sqrt(K / m).
  const double k = 300.0, x0 = 0.1, w = std::sqrt(k / params.mass.x());
  const auto cmd = fixed_command(Vec3::Zero(), Vec3(k, k, k));
  sim::SimState s = sim::initial_state(free_env, Vec3(x0, 0, 0));
  double worst = 0.0;
  for (int i = 0; i < 3000; ++i) {
    s = sim::step(s, cmd, free_env, Vec3::Zero(), params.dt, params);
    const double t = s.time;
    const double exact = x0 * (1 + w * t) * std::exp(-w * t);
    worst = std::max(worst, std::abs(s.position.x() - exact) / x0);
  }
  const bool closed_form = worst <= 1e-3;
  out << "closed-form rel err=" << worst;

  // Energy relative to the attractor from a generic initial state.
  const Vec3 stiff(250.0, 400.0, 120.0);
  const auto cmd3 = fixed_command(Vec3(0.1, -0.2, 0.05), stiff);
  s = sim::initial_state(free_env, Vec3(0.2, 0.1, -0.1));
  s.velocity = Vec3(0.3, -0.5, 0.2);
  double energy = sim::mechanical_energy(s, cmd3.attractor(), stiff, params.mass);
  bool monotone = true;
  for (int i = 0; i < 5000; ++i) {
    s = sim::step(s, cmd3, free_env, Vec3::Zero(), params.dt, params);
    const double e = sim::mechanical_energy(s, cmd3.attractor(), stiff, params.mass);
    monotone &= e <= energy * (1 + 1e-12) + 1e-15;
    energy = e;
  }
  out << "; energy " << (monotone ? "non-increasing" : "increased");

  // The same seed twice through a full experiment pipeline.
  auto spec = teacher::default_preset("perturbed_goal_prior_ablation");
  const auto a = teacher::run_seed(spec, 3);
  const auto b = teacher::run_seed(spec, 3);
  bool same = a.logs.size() == b.logs.size() && a.values.size() == b.values.size();
  for (size_t i = 0; same && i < a.logs.size(); ++i) {
    const auto& ta = a.logs[i].second.ticks;
    const auto& tb = b.logs[i].second.ticks;
    same &= ta.size() == tb.size();
    for (size_t j = 0; same && j < ta.size(); ++j) {
      same &= ta[j].position == tb[j].position && ta[j].velocity == tb[j].velocity &&
              ta[j].command.stiffness == tb[j].command.stiffness &&
              ta[j].perturbation == tb[j].perturbation;
    }
  }
  for (const auto& [key, value] : a.values) {
    const double other = b.values.at(key);
    same &= (std::isnan(value) && std::isnan(other)) || value == other;
  }
  out << "; repeat run " << (same ? "bit-identical" : "differs");
  return {closed_form && monotone && same, out.str()};
}

Verdict far_field() {
  const policy::PolicyConfig config;
  std::vector<policy::TimedTrajectory> demos;
  for (int v = 0; v < 3; ++v) demos.push_back(teacher::scripted_demo("unplug", v, 40 + v).trajectory);
  const auto p = policy::init_from_demos(demos, config);
  // Goal sample at K_max so the stiffness GP carries the largest target.
  const auto marked = policy::mark_goal(p, p.attractor.inputs().row(p.size() - 1).transpose()).policy;

  const auto& l = marked.attractor.hyper().lengthscales;
  const Eigen::MatrixXd& x = marked.attractor.inputs();
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> radius(5.0, 50.0);
  double worst_k = 0.0, worst_dx = 0.0;
  int probes = 0;
  while (probes < 500) {
    const Eigen::Index i = std::uniform_int_distribution<Eigen::Index>(0, x.rows() - 1)(rng);
    Vec3 dir(normal(rng), normal(rng), normal(rng));
    dir.normalize();
    const Vec3 q = x.row(i).transpose() + radius(rng) * l.maxCoeff() * dir;
    // Scaled distance to every sample must be at least 5.
    const double nearest =
        ((x.rowwise() - q.transpose()).array().rowwise() / l.transpose().array())
            .matrix()
            .rowwise()
            .norm()
            .minCoeff();
    if (nearest < 5.0) continue;
    ++probes;
    const auto cmd = policy::query(marked, q);
    worst_k = std::max(worst_k, cmd.stiffness.maxCoeff());
    worst_dx = std::max(worst_dx, cmd.attractor_displacement.norm());
  }
  const bool ok = worst_k <= 1e-3 * config.stiffness_max && worst_dx <= config.attractor_limit;
  std::ostringstream out;
  out << probes << " probes: max K=" << worst_k << " N/m (limit " << 1e-3 * config.stiffness_max
      << "), max |dx|=" << worst_dx << " m";
  return {ok, out.str()};
}

std::set<int> parse_only(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) != "--only") continue;
    std::stringstream list(argv[i + 1]);
    std::string item;
    while (std::getline(list, item, ',')) only.insert(std::stoi(item));
  }
  return only;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "correction exactness", 5.0, correction_exactness},
      {2, "variance gradient", 5.0, variance_gradient},
      {3, "modulation algebra", 0.0, modulation_algebra},
      {4, "stabilization ablation", 120.0, stabilization_ablation},
      {5, "contact-loss velocity", 120.0, contact_loss},
      {6, "unplug", 0.0, unplug},
      {7, "wiping cyclicity", 0.0, wiping},
      {8, "simulator fidelity", 0.0, simulator_fidelity},
      {9, "far-field safety", 0.0, far_field},
  };
  const std::set<int> only = parse_only(argc, argv);
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    if (c.time_limit_s > 0 && elapsed >= c.time_limit_s) {
      v.pass = false;
      v.detail += fmt("; over time limit of %.0f s", c.time_limit_s);
    }
    if (!v.pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), elapsed);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
