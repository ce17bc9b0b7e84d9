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

#include "ilosa/teacher/experiment.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ilosa/teacher/metrics.hpp"

namespace ilosa::teacher {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_wipe(const std::string& task) { return task == "wipe" || task == "wipe_obstacle"; }

std::vector<policy::TimedTrajectory> make_demos(const PresetSpec& spec, std::uint64_t seed) {
  std::vector<policy::TimedTrajectory> demos;
  for (int v : spec.variants) {
    demos.push_back(
        scripted_demo(spec.task, v, seed * 1000 + static_cast<std::uint64_t>(v), spec.demo)
            .trajectory);
  }
  return demos;
}

// Geometry the corrector follows: the middle demo variant, detoured when the
// task has a detour.
TaskGeometry teaching_geometry(const PresetSpec& spec) {
  return task_geometry(spec.task, spec.variants[spec.variants.size() / 2]);
}

EpisodeOptions base_options(const PresetSpec& spec, double duration) {
  EpisodeOptions o;
  o.duration = duration;
  o.control_period = spec.policy.control_period;
  o.sim = spec.sim;
  o.workspace = spec.workspace;
  return o;
}

struct Teaching {
  policy::PolicyState policy;
  std::vector<FeedbackRecord> feedback;
  std::vector<EpisodeLog> rounds;
};

Teaching teach(const PresetSpec& spec, policy::PolicyState policy, const sim::Environment& env,
               bool keep_logs) {
  const TaskGeometry g = teaching_geometry(spec);
  const ReferencePath& ref = g.detour ? *g.detour : g.path;
  Teaching t;
  for (int r = 0; r < spec.teaching_rounds; ++r) {
    ScriptedCorrector corrector(ref, g.goal, g.cyclic, spec.corrector);
    EpisodeOptions o = base_options(spec, spec.teach_duration);
    o.stop_after_goal = spec.settle_after_goal;
    if (g.cyclic) o.stop_after_laps = 2;
    EpisodeLog log = run_episode(policy, env, spec.start, &corrector, o);
    policy = log.policy;
    t.feedback.insert(t.feedback.end(), log.feedback.begin(), log.feedback.end());
    if (keep_logs) t.rounds.push_back(std::move(log));
  }
  t.policy = std::move(policy);
  return t;
}

void record_teaching(SeedOutcome& out, const Teaching& t) {
  const auto eff = data_efficiency(t.feedback);
  out.values["data_efficiency_pct"] = eff ? *eff : kNaN;
  out.values["feedback_events"] = static_cast<double>(t.feedback.size());
  out.values["appends"] = static_cast<double>(append_count(t.feedback));
  long corrective = 0;
  for (const auto& f : t.feedback) corrective += f.event.goal_flag ? 0 : 1;
  out.values["feedback_time_s"] = static_cast<double>(corrective) * 0.01;
  for (size_t i = 0; i < t.rounds.size(); ++i) {
    out.logs.emplace_back("teach" + std::to_string(i + 1), t.rounds[i]);
  }
}

double first_time_near(const EpisodeLog& log, const Vec3& goal, double radius, double fallback) {
  for (const TickRecord& r : log.ticks) {
    if ((r.position - goal).norm() < radius) return r.time;
  }
  return fallback;
}

SeedOutcome run_goal_task(const PresetSpec& spec, std::uint64_t seed, bool keep) {
  SeedOutcome out;
  out.seed = seed;
  const TaskGeometry g = teaching_geometry(spec);
  policy::PolicyState p = policy::init_from_demos(make_demos(spec, seed), spec.policy);
  Teaching t = teach(spec, std::move(p), spec.env, keep);
  record_teaching(out, t);
  EpisodeLog eval = run_episode(t.policy, spec.env, spec.start, nullptr,
                                base_options(spec, spec.eval_duration));
  out.values["goal_error_m"] = goal_error(eval, g.goal);
  out.values["peak_speed_mps"] = peak_speed(eval);
  if (spec.env.kind == sim::EnvKind::kPlug) {
    out.values["breakaway"] = eval.plug_released ? 1.0 : 0.0;
  }
  out.values["database_size"] = static_cast<double>(t.policy.size());
  if (keep) out.logs.emplace_back("eval", std::move(eval));
  out.policy = std::move(t.policy);
  return out;
}

SeedOutcome run_prior_ablation(const PresetSpec& spec, std::uint64_t seed, bool keep) {
  SeedOutcome out;
  out.seed = seed;
  const TaskGeometry g = teaching_geometry(spec);
  policy::PolicyState p = policy::init_from_demos(make_demos(spec, seed), spec.policy);
  Teaching t = teach(spec, std::move(p), spec.env, keep);
  record_teaching(out, t);

  // The disturbance acts while the taught policy transports the plug: from
  // the start until the unperturbed run first gets within 3 cm of the goal.
  const EpisodeLog nominal = run_episode(t.policy, spec.env, spec.start, nullptr,
                                         base_options(spec, spec.eval_duration));
  sim::PerturbationSpec pert = spec.perturbation;
  pert.seed = spec.perturbation.seed + seed;
  pert.end_time = std::min(pert.end_time,
                           first_time_near(nominal, g.goal, 0.03, 0.5 * spec.eval_duration));
  out.values["goal_error_nominal_m"] = goal_error(nominal, g.goal);
  out.values["perturbation_window_s"] = pert.end_time - pert.start_time;

  for (const bool prior : {true, false}) {
    policy::PolicyState q = t.policy;
    q.config.stabilization = prior;
    EpisodeOptions o = base_options(spec, spec.eval_duration);
    o.perturbation = pert;
    EpisodeLog log = run_episode(q, spec.env, spec.start, nullptr, o);
    const std::string tag = prior ? "with_prior" : "without_prior";
    out.values["goal_error_" + tag + "_m"] = goal_error(log, g.goal);
    out.values["left_workspace_" + tag] = log.left_workspace ? 1.0 : 0.0;
    if (keep) out.logs.emplace_back("eval_" + tag, std::move(log));
  }
  out.policy = std::move(t.policy);
  return out;
}

SeedOutcome run_box_ablation(const PresetSpec& spec, std::uint64_t seed, bool keep) {
  SeedOutcome out;
  out.seed = seed;
  const auto demos = make_demos(spec, seed);
  sim::Environment env = spec.env;
  env.box.removal_time = std::numeric_limits<double>::infinity();
  const Vec3& n = env.box.push_direction;

  for (const bool bounded : {true, false}) {
    PresetSpec s = spec;
    s.policy.bounded_attractor = bounded;
    const std::string tag = bounded ? "bounded" : "unbounded";
    Teaching t = teach(s, policy::init_from_demos(demos, s.policy), env, keep);
    const auto eff = data_efficiency(t.feedback);
    out.values["data_efficiency_" + tag + "_pct"] = eff ? *eff : kNaN;

    const EpisodeLog dry =
        run_episode(t.policy, env, s.start, nullptr, base_options(s, s.eval_duration));
    double removal = kNaN;
    for (const TickRecord& r : dry.ticks) {
      if (r.position.dot(n) >= spec.removal_progress) {
        removal = r.time;
        break;
      }
    }
    out.values["removal_time_" + tag + "_s"] = removal;
    if (keep) out.logs.emplace_back("dry_" + tag, dry);
    if (std::isnan(removal)) {
      out.values["peak_speed_" + tag + "_mps"] = kNaN;
      continue;
    }
    sim::Environment removed = env;
    removed.box.removal_time = removal;
    EpisodeLog log =
        run_episode(t.policy, removed, s.start, nullptr, base_options(s, s.eval_duration));
    out.values["peak_speed_" + tag + "_mps"] =
        peak_speed(log, removal, removal + spec.speed_window);
    out.values["push_force_" + tag + "_N"] =
        dry.ticks.empty() ? kNaN : [&] {
          double f = 0.0;
          for (const TickRecord& r : dry.ticks) f = std::max(f, r.normal_force);
          return f;
        }();
    if (keep) {
      for (size_t i = 0; i < t.rounds.size(); ++i) {
        out.logs.emplace_back("teach" + std::to_string(i + 1) + "_" + tag, t.rounds[i]);
      }
      out.logs.emplace_back("eval_" + tag, std::move(log));
    }
    if (bounded) out.policy = t.policy;
  }
  out.values["speed_ratio"] =
      out.values["peak_speed_bounded_mps"] / out.values["peak_speed_unbounded_mps"];
  return out;
}

SeedOutcome run_wipe(const PresetSpec& spec, std::uint64_t seed, bool keep) {
  SeedOutcome out;
  out.seed = seed;
  const TaskGeometry g = teaching_geometry(spec);
  policy::PolicyState p = policy::init_from_demos(make_demos(spec, seed), spec.policy);
  Teaching t = teach(spec, std::move(p), spec.env, keep);
  record_teaching(out, t);

  EpisodeLog eval = run_episode(t.policy, spec.env, spec.start, nullptr,
                                base_options(spec, spec.eval_duration));
  auto loops = split_loop_ticks(eval, g.path.start(), spec.loop_radius,
                                4.0 * spec.loop_radius);
  if (static_cast<int>(loops.size()) > spec.loops) loops.resize(static_cast<size_t>(spec.loops));
  std::vector<Trace> traces;
  double coverage = loops.empty() ? 0.0 : 1.0;
  for (const auto& loop : loops) {
    Trace tr;
    for (const TickRecord* r : loop) tr.push_back(r->position);
    traces.push_back(std::move(tr));
    coverage = std::min(coverage, force_coverage(loop, spec.force_threshold));
  }
  out.values["loops_completed"] = static_cast<double>(loops.size());
  out.values["loop_consistency_m"] = traces.size() >= 2 ? loop_consistency(traces) : kNaN;
  out.values["min_force_coverage"] = coverage;
  out.values["obstacle_ticks"] = static_cast<double>(eval.obstacle_ticks);
  if (keep) out.logs.emplace_back("eval", std::move(eval));
  out.policy = std::move(t.policy);
  return out;
}

std::vector<std::string> columns_for(const std::string& preset) {
  if (preset == "perturbed_goal_prior_ablation") {
    return {"goal_error_with_prior_m", "goal_error_without_prior_m", "left_workspace_with_prior",
            "left_workspace_without_prior", "goal_error_nominal_m", "perturbation_window_s",
            "data_efficiency_pct"};
  }
  if (preset == "box_contact_loss_ablation") {
    return {"peak_speed_bounded_mps", "peak_speed_unbounded_mps", "speed_ratio",
            "removal_time_bounded_s", "removal_time_unbounded_s", "push_force_bounded_N",
            "push_force_unbounded_N", "data_efficiency_bounded_pct",
            "data_efficiency_unbounded_pct"};
  }
  if (preset == "wipe_cyclic" || preset == "wipe_obstacle") {
    return {"loop_consistency_m", "min_force_coverage", "loops_completed", "obstacle_ticks",
            "data_efficiency_pct", "feedback_events", "appends", "feedback_time_s"};
  }
  std::vector<std::string> c{"goal_error_m", "data_efficiency_pct", "feedback_time_s",
                             "feedback_events", "appends", "peak_speed_mps", "database_size"};
  if (preset.rfind("unplug", 0) == 0) c.insert(c.begin() + 1, "breakaway");
  return c;
}

template <typename T>
void read(const json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

void read_vec(const json& doc, const char* key, Vec3& out) {
  if (!doc.contains(key)) return;
  const auto v = doc.at(key).get<std::vector<double>>();
  if (v.size() != 3) throw InvalidArgument(std::string(key) + " needs 3 entries");
  out = Vec3(v[0], v[1], v[2]);
}

}  // namespace

std::vector<std::string> known_presets() {
  return {"unplug_single",  "unplug_multi", "perturbed_goal_prior_ablation",
          "box_contact_loss_ablation", "wipe_cyclic", "wipe_obstacle", "plug_insert"};
}

PresetSpec default_preset(const std::string& name) {
  PresetSpec s;
  s.name = name;
  if (name == "unplug_single" || name == "unplug_multi" ||
      name == "perturbed_goal_prior_ablation") {
    s.task = "unplug";
    s.variants = name == "unplug_multi" ? std::vector<int>{0, 1, 2} : std::vector<int>{1};
    s.env.kind = sim::EnvKind::kPlug;
    s.env.plug.breakaway_force = 20.0;
    if (name == "unplug_multi") s.teaching_rounds = 5;
    if (name == "perturbed_goal_prior_ablation") {
      // Per-axis pushes of ~10 N add up to ~17 N, above the default cap.
      s.policy.max_stabilization_force = 50.0;
      s.perturbation.signed_mode = true;
      s.perturbation.mean = 10.0;
      s.perturbation.stddev = 5.0;
      s.perturbation.hold_interval = 0.2;
    }
  } else if (name == "box_contact_loss_ablation") {
    s.task = "box";
    s.env.kind = sim::EnvKind::kBox;
    s.env.box.face_point = Vec3(0.05, 0, 0);
    // Coulomb plus viscous drag: 30 N at 0.1 m/s.
    s.env.box.friction_force = 20.0;
    s.env.box.viscous_friction = 100.0;
    s.policy.attractor_limit = 0.02;
    s.policy.stiffness_max = 2000.0;
  } else if (name == "wipe_cyclic" || name == "wipe_obstacle") {
    s.task = name == "wipe_obstacle" ? "wipe_obstacle" : "wipe";
    s.env.kind = sim::EnvKind::kWhiteboard;
    s.env.board.plane_point = Vec3::Zero();
    s.env.board.normal = Vec3::UnitZ();
    s.env.board.normal_stiffness = 5000.0;
    s.env.board.friction_coefficient = 0.2;
    if (name == "wipe_obstacle") s.env.obstacle = wipe_obstacle_box();
    s.corrector.target_force = 10.0;
    s.corrector.force_band = 2.0;
    s.corrector.force_direction = -Vec3::UnitZ();
    s.start = task_geometry("wipe").path.start();
    s.teach_duration = 60.0;
    s.eval_duration = 70.0;
  } else if (name == "plug_insert") {
    s.task = "plug_insert";
    s.env.kind = sim::EnvKind::kBox;
    s.env.box.face_point = Vec3(0.2, 0, 0.03);
    s.env.box.push_direction = -Vec3::UnitZ();
    s.env.box.friction_force = 10.0;
    s.start = task_geometry("plug_insert").path.start();
    s.teaching_rounds = 5;
  } else {
    throw InvalidArgument("unknown preset '" + name + "'");
  }
  return s;
}

PresetSpec apply_overrides(PresetSpec s, const json& o) {
  if (o.is_null()) return s;
  if (!o.is_object()) throw InvalidArgument("preset overrides must be an object");
  static const std::vector<std::string> keys{
      "policy", "env", "sim", "corrector", "perturbation", "demo", "task", "variants",
      "teaching_rounds", "teach_duration", "eval_duration", "settle_after_goal", "start",
      "workspace", "loops", "force_threshold", "loop_radius", "removal_progress", "speed_window", "seeds"};
  for (const auto& [key, value] : o.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw InvalidArgument("unknown preset key '" + key + "'");
    }
  }
  try {
    if (o.contains("policy")) s.policy = policy::config_from_json(o.at("policy"), s.policy);
    if (o.contains("env")) s.env = sim::environment_from_json(o.at("env"), s.env);
    if (o.contains("corrector")) {
      s.corrector = corrector_config_from_json(o.at("corrector"), s.corrector);
    }
    if (o.contains("perturbation")) {
      s.perturbation = sim::perturbation_from_json(o.at("perturbation"), s.perturbation);
    }
    if (o.contains("sim")) s.sim = sim::sim_params_from_json(o.at("sim"), s.sim);
    if (o.contains("demo")) {
      const json& d = o.at("demo");
      read(d, "period", s.demo.period);
      read(d, "peak_speed", s.demo.peak_speed);
      read(d, "jitter", s.demo.jitter);
    }
    read(o, "task", s.task);
    read(o, "variants", s.variants);
    read(o, "teaching_rounds", s.teaching_rounds);
    read(o, "teach_duration", s.teach_duration);
    read(o, "eval_duration", s.eval_duration);
    read(o, "settle_after_goal", s.settle_after_goal);
    read_vec(o, "start", s.start);
    if (o.contains("workspace")) {
      read_vec(o.at("workspace"), "lower", s.workspace.lower);
      read_vec(o.at("workspace"), "upper", s.workspace.upper);
    }
    read(o, "loops", s.loops);
    read(o, "force_threshold", s.force_threshold);
    read(o, "loop_radius", s.loop_radius);
    read(o, "removal_progress", s.removal_progress);
    read(o, "speed_window", s.speed_window);
    read(o, "seeds", s.seeds);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed preset overrides: ") + e.what());
  }
  s.policy.validate();
  s.sim.validate();
  s.env.validate();
  if (s.variants.empty()) throw InvalidArgument("preset needs at least one demo variant");
  if (s.teaching_rounds < 0) throw InvalidArgument("teaching_rounds must be >= 0");
  return s;
}

json to_json(const PresetSpec& s) {
  json doc;
  doc["task"] = s.task;
  doc["variants"] = s.variants;
  doc["policy"] = policy::to_json(s.policy);
  doc["env"] = sim::to_json(s.env);
  doc["sim"] = sim::to_json(s.sim);
  doc["corrector"] = to_json(s.corrector);
  doc["perturbation"] = sim::to_json(s.perturbation);
  doc["demo"] = {{"period", s.demo.period},
                 {"peak_speed", s.demo.peak_speed},
                 {"jitter", s.demo.jitter}};
  doc["teaching_rounds"] = s.teaching_rounds;
  doc["teach_duration"] = s.teach_duration;
  doc["eval_duration"] = s.eval_duration;
  doc["settle_after_goal"] = s.settle_after_goal;
  doc["start"] = vec_json(s.start);
  doc["workspace"] = {{"lower", vec_json(s.workspace.lower)},
                      {"upper", vec_json(s.workspace.upper)}};
  doc["loops"] = s.loops;
  doc["force_threshold"] = s.force_threshold;
  doc["loop_radius"] = s.loop_radius;
  doc["removal_progress"] = s.removal_progress;
  doc["speed_window"] = s.speed_window;
  doc["seeds"] = s.seeds;
  return doc;
}

std::map<std::string, PresetSpec> presets_from_json(const json& doc) {
  std::map<std::string, PresetSpec> out;
  for (const std::string& name : known_presets()) out[name] = default_preset(name);
  if (!doc.contains("presets")) return out;
  for (const auto& [name, overrides] : doc.at("presets").items()) {
    if (!out.count(name)) throw InvalidArgument("unknown preset '" + name + "'");
    out[name] = apply_overrides(out[name], overrides);
  }
  return out;
}

std::map<std::string, PresetSpec> load_presets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  try {
    return presets_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

SeedOutcome run_seed(const PresetSpec& spec, std::uint64_t seed, const ExperimentOptions& opt) {
  if (spec.name == "perturbed_goal_prior_ablation") return run_prior_ablation(spec, seed, opt.keep_logs);
  if (spec.name == "box_contact_loss_ablation") return run_box_ablation(spec, seed, opt.keep_logs);
  if (is_wipe(spec.task)) return run_wipe(spec, seed, opt.keep_logs);
  return run_goal_task(spec, seed, opt.keep_logs);
}

ExperimentTable run_experiment(const PresetSpec& spec, const ExperimentOptions& options) {
  ExperimentTable table;
  table.preset = spec.name;
  table.columns = columns_for(spec.name);
  table.seeds.resize(spec.seeds.size());
  std::vector<std::exception_ptr> errors(spec.seeds.size());
  const int n = static_cast<int>(spec.seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      table.seeds[static_cast<size_t>(i)] = run_seed(spec, spec.seeds[static_cast<size_t>(i)], options);
    } catch (...) {
      errors[static_cast<size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return table;
}

namespace {
template <typename F>
double reduce(const ExperimentTable& t, const std::string& column, F f, bool average) {
  double acc = kNaN;
  int count = 0;
  for (const SeedOutcome& s : t.seeds) {
    const auto it = s.values.find(column);
    if (it == s.values.end() || std::isnan(it->second)) continue;
    acc = count == 0 ? it->second : f(acc, it->second);
    ++count;
  }
  return average && count > 0 ? acc / count : acc;
}
}  // namespace

double ExperimentTable::max(const std::string& c) const {
  return reduce(*this, c, [](double a, double b) { return std::max(a, b); }, false);
}
double ExperimentTable::mean(const std::string& c) const {
  return reduce(*this, c, [](double a, double b) { return a + b; }, true);
}
double ExperimentTable::min(const std::string& c) const {
  return reduce(*this, c, [](double a, double b) { return std::min(a, b); }, false);
}

namespace {
std::vector<std::pair<std::string, std::vector<double>>> table_rows(const ExperimentTable& t) {
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (const SeedOutcome& s : t.seeds) {
    std::vector<double> v;
    for (const std::string& c : t.columns) {
      const auto it = s.values.find(c);
      v.push_back(it == s.values.end() ? kNaN : it->second);
    }
    rows.emplace_back("seed " + std::to_string(s.seed), std::move(v));
  }
  for (const char* stat : {"max", "mean", "min"}) {
    std::vector<double> v;
    for (const std::string& c : t.columns) {
      v.push_back(stat[1] == 'a' ? t.max(c) : stat[1] == 'e' ? t.mean(c) : t.min(c));
    }
    rows.emplace_back(stat, std::move(v));
  }
  return rows;
}

std::string cell(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream ss;
  ss << std::setprecision(6) << v;
  return ss.str();
}
}  // namespace

void write_table_csv(const ExperimentTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << "row";
  for (const std::string& c : t.columns) out << ',' << c;
  out << '\n';
  for (const auto& [label, values] : table_rows(t)) {
    out << label;
    for (double v : values) out << ',' << cell(v);
    out << '\n';
  }
}

std::string format_table(const ExperimentTable& t) {
  const auto rows = table_rows(t);
  std::vector<size_t> width{8};
  for (const auto& [label, _] : rows) width[0] = std::max(width[0], label.size());
  for (size_t j = 0; j < t.columns.size(); ++j) {
    size_t w = t.columns[j].size();
    for (const auto& r : rows) w = std::max(w, cell(r.second[j]).size());
    width.push_back(w);
  }
  std::ostringstream ss;
  ss << t.preset << '\n' << std::left << std::setw(static_cast<int>(width[0])) << "";
  for (size_t j = 0; j < t.columns.size(); ++j) {
    ss << "  " << std::setw(static_cast<int>(width[j + 1])) << t.columns[j];
  }
  ss << '\n';
  for (const auto& [label, values] : rows) {
    ss << std::setw(static_cast<int>(width[0])) << label;
    for (size_t j = 0; j < values.size(); ++j) {
      const std::string c = std::isnan(values[j]) ? "-" : cell(values[j]);
      ss << "  " << std::setw(static_cast<int>(width[j + 1])) << c;
    }
    ss << '\n';
  }
  return ss.str();
}

}  // namespace ilosa::teacher
