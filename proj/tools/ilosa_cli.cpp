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

// ilosa: experiment presets, demo training, field export, log replay, and
// the live teaching service.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ilosa/checksum.hpp"
#include "ilosa/gp/serialize.hpp"
#include "ilosa/policy/field.hpp"
#include "ilosa/policy/io.hpp"
#include "ilosa/service/server.hpp"
#include "ilosa/teacher/experiment.hpp"
#include "ilosa/teacher/log_io.hpp"
#include "ilosa/teacher/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ilosa;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

// Input the user can fix: reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

Vec3 to_vec3(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) throw UsageError(std::string(what) + " needs 3 comma-separated values");
  return Vec3(v[0], v[1], v[2]);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Checksums every artifact and writes manifest.json next to them. Called
// after all other outputs exist.
void write_manifest(const fs::path& dir, json manifest, const std::vector<fs::path>& files) {
  json artifacts = json::array();
  for (const fs::path& f : files) {
    artifacts.push_back({{"path", fs::relative(f, dir).generic_string()},
                         {"bytes", fs::file_size(f)},
                         {"sha256", sha256_file(f.string())}});
  }
  manifest["artifacts"] = std::move(artifacts);
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string preset;
  std::vector<std::uint64_t> seeds;
  bool all_logs = false;
};

int cmd_experiment(const Globals& g, const ExperimentArgs& a) {
  std::map<std::string, teacher::PresetSpec> presets;
  json overrides = nullptr;
  if (!g.config.empty()) {
    const json doc = read_json_file(g.config);
    try {
      presets = teacher::presets_from_json(doc);
    } catch (const InvalidArgument& e) {
      throw UsageError(g.config + ": " + e.what());
    }
    if (doc.contains("presets") && doc["presets"].contains(a.preset)) {
      overrides = doc["presets"][a.preset];
    }
  } else {
    for (const auto& name : teacher::known_presets()) presets[name] = teacher::default_preset(name);
  }
  const auto it = presets.find(a.preset);
  if (it == presets.end()) {
    std::ostringstream msg;
    msg << "unknown preset '" << a.preset << "'; known presets:";
    for (const auto& name : teacher::known_presets()) msg << ' ' << name;
    throw UsageError(msg.str());
  }
  teacher::PresetSpec spec = it->second;
  if (!a.seeds.empty()) spec.seeds = a.seeds;
  if (g.seed) spec.seeds = {*g.seed};

  const fs::path dir = g.out.empty() ? fs::path("runs") / spec.name : fs::path(g.out);
  fs::create_directories(dir / "logs");
  fs::create_directories(dir / "policies");

  const teacher::ExperimentTable table = teacher::run_experiment(spec, {.keep_logs = true});

  std::vector<fs::path> files;
  for (const teacher::SeedOutcome& s : table.seeds) {
    for (const auto& [label, log] : s.logs) {
      const bool evaluation = label.rfind("teach", 0) != 0 && label.rfind("dry", 0) != 0;
      if (!evaluation && !a.all_logs) continue;
      const fs::path f = dir / "logs" / ("seed" + std::to_string(s.seed) + "_" + label + ".csv");
      teacher::write_log_csv(log, f.string());
      files.push_back(f);
    }
    if (s.policy) {
      const fs::path f = dir / "policies" / ("seed" + std::to_string(s.seed) + ".json");
      policy::save_policy(*s.policy, f.string());
      files.push_back(f);
    }
  }
  const fs::path csv = dir / "table.csv";
  teacher::write_table_csv(table, csv.string());
  files.push_back(csv);
  const std::string text = teacher::format_table(table);
  write_text(dir / "table.txt", text);
  files.push_back(dir / "table.txt");

  write_manifest(dir,
                 {{"command", "experiment"},
                  {"preset", spec.name},
                  {"seeds", spec.seeds},
                  {"config", g.config.empty() ? json(nullptr) : json(g.config)},
                  {"overrides", overrides},
                  {"spec", teacher::to_json(spec)},
                  {"output_dir", dir.generic_string()}},
                 files);
  if (!g.quiet) std::cout << text << "written to " << dir.string() << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------- train

int cmd_train(const Globals& g, const std::vector<std::string>& demo_files) {
  policy::PolicyConfig config;
  if (!g.config.empty()) {
    const json doc = read_json_file(g.config);
    try {
      if (doc.contains("policy")) config = policy::config_from_json(doc.at("policy"));
    } catch (const InvalidArgument& e) {
      throw UsageError(g.config + ": " + e.what());
    }
  }
  std::vector<policy::TimedTrajectory> demos;
  for (const std::string& f : demo_files) demos.push_back(policy::load_demo(f));
  const policy::PolicyState p = policy::init_from_demos(demos, config);
  const std::string out = g.out.empty() ? "policy.json" : g.out;
  if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
  policy::save_policy(p, out);
  if (!g.quiet) {
    const auto& h = p.attractor.hyper();
    std::cout << "inputs " << p.size() << "\nlengthscales " << h.lengthscales.transpose()
              << "\nsignal_variance " << h.signal_variance << "\nnoise_variance "
              << h.noise_variance << "\nwritten to " << out << "\n";
  }
  return kExitOk;
}

// --------------------------------------------------------------------- field

struct FieldArgs {
  std::string policy;
  std::vector<double> lower, upper;
  std::vector<int> resolution{60, 60};
  int slice_axis = 2;
  std::optional<double> slice_value;
};

int cmd_field(const Globals& g, const FieldArgs& a) {
  const policy::PolicyState p = policy::load_policy(a.policy);
  if (p.empty()) throw std::runtime_error(a.policy + ": policy has no data");
  policy::FieldSpec spec;
  spec.slice_axis = a.slice_axis;
  if (a.slice_axis < 0 || a.slice_axis > 2) throw UsageError("--slice-axis must be 0, 1 or 2");
  const auto axes = spec.plane_axes();
  const Eigen::MatrixXd& X = p.attractor.inputs();
  spec.slice_value = a.slice_value ? *a.slice_value : X.col(a.slice_axis).mean();
  for (int i = 0; i < 2; ++i) {
    const double lo = X.col(axes[static_cast<size_t>(i)]).minCoeff();
    const double hi = X.col(axes[static_cast<size_t>(i)]).maxCoeff();
    const double pad = 0.05 + 0.1 * (hi - lo);
    spec.lower[static_cast<size_t>(i)] = lo - pad;
    spec.upper[static_cast<size_t>(i)] = hi + pad;
  }
  auto pair = [](const auto& v, const char* what) {
    if (v.size() != 2) throw UsageError(std::string(what) + " needs 2 comma-separated values");
  };
  if (!a.lower.empty()) {
    pair(a.lower, "--lower");
    spec.lower = {a.lower[0], a.lower[1]};
  }
  if (!a.upper.empty()) {
    pair(a.upper, "--upper");
    spec.upper = {a.upper[0], a.upper[1]};
  }
  pair(a.resolution, "--resolution");
  spec.resolution = {a.resolution[0], a.resolution[1]};
  try {
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const policy::FieldGrid grid = policy::evaluate_field(p, spec);
  const std::string out = g.out.empty() ? "field.csv" : g.out;
  if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
  policy::write_field_csv(grid, out);
  if (!g.quiet) {
    std::cout << grid.cells.size() << " cells written to " << out << "\n";
  }
  return kExitOk;
}

// -------------------------------------------------------------------- replay

struct ReplayArgs {
  std::string log;
  std::vector<double> goal;
  std::string policy;
};

int cmd_replay(const Globals& g, const ReplayArgs& a) {
  const std::vector<teacher::TickRecord> ticks = teacher::read_log_csv(a.log);
  if (ticks.empty()) throw std::runtime_error(a.log + ": no ticks");
  const double period = ticks.size() > 1 ? ticks[1].time - ticks[0].time : 0.0;
  long corrective = 0, goals = 0, appends = 0;
  double peak = 0.0;
  for (const auto& t : ticks) {
    corrective += t.feedback == 1 ? 1 : 0;
    goals += t.feedback == 2 ? 1 : 0;
    appends += t.branch == 1 ? 1 : 0;
    peak = std::max(peak, t.velocity.norm());
  }
  const Vec3 last = ticks.back().position;
  json summary{{"log", a.log},
               {"ticks", ticks.size()},
               {"duration_s", ticks.back().time - ticks.front().time + period},
               {"feedback_events", corrective + goals},
               {"goal_events", goals},
               {"append_events", appends},
               {"feedback_time_s", static_cast<double>(corrective) * period},
               {"peak_speed_mps", peak},
               {"final_position", {last.x(), last.y(), last.z()}}};
  const auto eff = teacher::data_efficiency(corrective + goals, appends);
  summary["data_efficiency_pct"] = eff ? json(*eff) : json(nullptr);
  if (!a.goal.empty()) summary["goal_error_m"] = (last - to_vec3(a.goal, "--goal")).norm();
  if (!a.policy.empty()) {
    // Re-issue the logged queries; exact for ticks after the last feedback.
    const policy::PolicyState p = policy::load_policy(a.policy);
    size_t from = 0;
    for (size_t i = 0; i < ticks.size(); ++i) {
      if (ticks[i].feedback != 0) from = i;
    }
    double worst = 0.0;
    for (size_t i = from; i < ticks.size(); ++i) {
      const auto c = policy::query(p, ticks[i].position);
      worst = std::max(worst, (c.attractor_displacement -
                               ticks[i].command.attractor_displacement).cwiseAbs().maxCoeff());
    }
    summary["requery_from_tick"] = from;
    summary["requery_max_dx_error_m"] = worst;
  }
  const std::string text = summary.dump(2) + "\n";
  if (!g.out.empty()) write_text(g.out, text);
  if (!g.quiet) std::cout << text;
  return kExitOk;
}

// --------------------------------------------------------------------- serve

struct ServeArgs {
  std::string listen;
  std::string log_dir;
  double realtime_factor = 0.0;
};

std::pair<std::string, unsigned short> split_listen(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) throw UsageError("--listen expects host:port");
  try {
    const int port = std::stoi(s.substr(colon + 1));
    if (port < 0 || port > 65535) throw std::out_of_range("port");
    return {s.substr(0, colon), static_cast<unsigned short>(port)};
  } catch (const std::logic_error&) {
    throw UsageError("bad port in --listen '" + s + "'");
  }
}

int cmd_serve(const Globals& g, const ServeArgs& a) {
  service::ServerOptions options;
  service::SessionConfig defaults;
  std::string listen = "127.0.0.1:8080";
  if (!g.config.empty()) {
    const json doc = read_json_file(g.config);
    try {
      const json svc = doc.value("service", json::object());
      for (const auto& [key, value] : svc.items()) {
        if (key == "listen") {
          listen = value.get<std::string>();
        } else if (key == "log_dir") {
          options.log_dir = value.get<std::string>();
        } else if (key == "realtime_factor") {
          options.realtime_factor = value.get<double>();
        } else if (key == "session") {
          defaults = service::session_config_from_json(value);
        } else {
          throw InvalidArgument("unknown service key '" + key + "'");
        }
      }
    } catch (const InvalidArgument& e) {
      throw UsageError(g.config + ": " + e.what());
    } catch (const json::exception& e) {
      throw UsageError(g.config + ": " + e.what());
    }
  }
  if (!a.listen.empty()) listen = a.listen;
  if (!a.log_dir.empty()) options.log_dir = a.log_dir;
  if (!g.out.empty() && a.log_dir.empty()) options.log_dir = g.out;
  if (a.realtime_factor > 0.0) options.realtime_factor = a.realtime_factor;
  if (!(options.realtime_factor > 0.0)) throw UsageError("realtime_factor must be > 0");
  std::tie(options.address, options.port) = split_listen(listen);
  options.handle_signals = true;

  service::SessionManager sessions(defaults);
  service::Server server(sessions, options);
  const unsigned short port = server.port();
  if (!g.quiet) std::cout << "listening on " << options.address << ":" << port << std::endl;
  server.run();

  const auto written = server.flush_logs();
  if (!options.log_dir.empty()) {
    std::vector<fs::path> files(written.begin(), written.end());
    write_manifest(options.log_dir,
                   {{"command", "serve"},
                    {"listen", options.address + ":" + std::to_string(port)},
                    {"config", g.config.empty() ? json(nullptr) : json(g.config)},
                    {"sessions", sessions.sessions().size()}},
                   files);
  }
  if (!g.quiet) std::cout << "stopped" << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GP impedance policies taught by corrections: experiments, training, service"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "JSON configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "Run a single seed");
  app.add_option("--out", g.out, "Output directory or file");
  app.add_flag("--quiet", g.quiet, "Suppress console output");

  ExperimentArgs ea;
  auto* exp = app.add_subcommand("experiment", "Run an experiment preset across seeds");
  exp->add_option("preset", ea.preset, "Preset name")->required();
  exp->add_option("--seeds", ea.seeds, "Seeds (comma separated)")->delimiter(',');
  exp->add_flag("--all-logs", ea.all_logs, "Also write teaching-round logs");

  std::vector<std::string> demos;
  auto* train = app.add_subcommand("train", "Train a policy from recorded demo files");
  train->add_option("demos", demos, "Demo files (.csv with t,x,y,z or .json)")
      ->required()
      ->check(CLI::ExistingFile);

  FieldArgs fa;
  auto* field = app.add_subcommand("field", "Write a field slice of a policy as CSV");
  field->add_option("policy", fa.policy, "Policy JSON")->required()->check(CLI::ExistingFile);
  field->add_option("--lower", fa.lower, "Lower plane bounds u,v")->delimiter(',');
  field->add_option("--upper", fa.upper, "Upper plane bounds u,v")->delimiter(',');
  field->add_option("--resolution", fa.resolution, "Cells nu,nv")->delimiter(',');
  field->add_option("--slice-axis", fa.slice_axis, "Axis held fixed (0=x, 1=y, 2=z)");
  double slice_value = 0.0;
  auto* slice_opt = field->add_option("--slice-value", slice_value, "Coordinate of the slice");

  ReplayArgs ra;
  auto* replay = app.add_subcommand("replay", "Summarize an episode log");
  replay->add_option("log", ra.log, "Episode log CSV")->required()->check(CLI::ExistingFile);
  replay->add_option("--goal", ra.goal, "Goal x,y,z for the terminal error")->delimiter(',');
  replay->add_option("--policy", ra.policy, "Policy JSON to re-query")->check(CLI::ExistingFile);

  ServeArgs sa;
  auto* serve = app.add_subcommand("serve", "Run the live teaching service");
  serve->add_option("--listen", sa.listen, "host:port (default 127.0.0.1:8080)");
  serve->add_option("--log-dir", sa.log_dir, "Directory for session logs on shutdown");
  serve->add_option("--realtime-factor", sa.realtime_factor, "Simulated seconds per second");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (*seed_opt) g.seed = seed;
  if (*slice_opt) fa.slice_value = slice_value;

  try {
    if (*exp) return cmd_experiment(g, ea);
    if (*train) return cmd_train(g, demos);
    if (*field) return cmd_field(g, fa);
    if (*replay) return cmd_replay(g, ra);
    if (*serve) return cmd_serve(g, sa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
