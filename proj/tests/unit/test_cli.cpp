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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <thread>

#include "ilosa/checksum.hpp"
#include "ilosa/policy/io.hpp"
#include "ilosa/teacher/demos.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int run(const std::string& args) {
  const std::string cmd = std::string(ILOSA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("ilosa_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

TEST_F(CliTest, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("experiment"), 2);
  EXPECT_EQ(run("experiment no_such_preset"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(CliTest, BadInputsAndRuntimeFailures) {
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{ not json";
  EXPECT_EQ(run("--config " + bad.string() + " experiment unplug_single"), 2);
  // Output directory below a regular file cannot be created.
  const fs::path blocker = dir / "blocker";
  std::ofstream(blocker) << "x";
  EXPECT_EQ(run("--quiet --seed 1 --out " + (blocker / "sub").string() + " experiment unplug_single"), 3);
  const fs::path corrupt = dir / "corrupt.json";
  std::ofstream(corrupt) << R"({"attractor": 5})";
  EXPECT_NE(run("field " + corrupt.string()), 0);
  const fs::path empty = dir / "empty.csv";
  std::ofstream(empty) << "t,x,y,z\n";
  EXPECT_NE(run("--out " + (dir / "p.json").string() + " train " + empty.string()), 0);
}

TEST_F(CliTest, ExperimentWritesTableLogsAndManifest) {
  ASSERT_EQ(run("--quiet --seed 2 --out " + dir.string() + " experiment unplug_single"), 0);
  ASSERT_TRUE(fs::exists(dir / "table.csv"));
  ASSERT_TRUE(fs::exists(dir / "logs" / "seed2_eval.csv"));
  ASSERT_TRUE(fs::exists(dir / "policies" / "seed2.json"));
  const json manifest = read_json(dir / "manifest.json");
  ASSERT_FALSE(manifest["artifacts"].empty());
  for (const auto& a : manifest["artifacts"]) {
    const fs::path p = dir / a["path"].get<std::string>();
    EXPECT_EQ(a["sha256"], ilosa::sha256_file(p.string())) << p;
    EXPECT_EQ(a["bytes"].get<std::uintmax_t>(), fs::file_size(p));
  }
  std::ifstream table(dir / "table.csv");
  std::string header;
  std::getline(table, header);
  EXPECT_NE(header.find("goal_error_m"), std::string::npos);

  // Replay the evaluation log against the saved policy.
  const fs::path summary = dir / "replay.json";
  ASSERT_EQ(run("--out " + summary.string() + " replay " + (dir / "logs" / "seed2_eval.csv").string() +
                " --policy " + (dir / "policies" / "seed2.json").string()),
            0);
  const json s = read_json(summary);
  EXPECT_TRUE(s.contains("data_efficiency_pct"));
}

TEST_F(CliTest, RerunReproducesChecksums) {
  const fs::path a = dir / "a", b = dir / "b";
  ASSERT_EQ(run("--quiet --seed 3 --out " + a.string() + " experiment plug_insert"), 0);
  ASSERT_EQ(run("--quiet --seed 3 --out " + b.string() + " experiment plug_insert"), 0);
  const json ma = read_json(a / "manifest.json"), mb = read_json(b / "manifest.json");
  EXPECT_EQ(ma["artifacts"], mb["artifacts"]);
}

TEST_F(CliTest, FieldOfUnplugPolicyPeaksNearSocket) {
  // The taught force (modulated force less the stabilization pull, which
  // dominates off the path) is largest at the start of the unplug motion.
  const fs::path out = dir / "exp";
  ASSERT_EQ(run("--quiet --seed 1 --out " + out.string() + " experiment unplug_single"), 0);
  const fs::path field = dir / "field.csv";
  ASSERT_EQ(run("--out " + field.string() + " field " + (out / "policies" / "seed1.json").string() +
                " --slice-axis 1 --slice-value 0 --lower -0.05,-0.05 --upper 0.35,0.3 --resolution 81,71"),
            0);
  std::ifstream in(field);
  std::string line;
  std::getline(in, line);
  double best = -1.0, bx = 0.0, bz = 0.0;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string cell;
    double v[7];
    for (double& x : v) {
      std::getline(row, cell, ',');
      x = std::stod(cell);
    }
    const double f = std::hypot(v[2] - v[5], v[3] - v[6]);
    if (f > best) best = f, bx = v[0], bz = v[1];
  }
  const auto geo = ilosa::teacher::task_geometry("unplug", 0);
  EXPECT_LE(std::hypot(bx - geo.path.start().x(), bz - geo.path.start().z()), 0.03)
      << "peak at " << bx << "," << bz;
}

TEST_F(CliTest, FieldEdgeCases) {
  const auto demo = ilosa::teacher::scripted_demo("unplug", 0, 1).trajectory;
  const fs::path csv = dir / "demo.csv";
  ilosa::policy::write_demo_csv(demo, csv.string());
  const fs::path policy = dir / "policy.json";
  ASSERT_EQ(run("--out " + policy.string() + " train " + csv.string()), 0);
  const fs::path one = dir / "one.csv";
  ASSERT_EQ(run("--out " + one.string() + " field " + policy.string() + " --resolution 1,1"), 0);
  std::ifstream in(one);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) lines += !line.empty();
  EXPECT_EQ(lines, 2);  // header plus one cell

  json untrained = ilosa::policy::to_json(ilosa::policy::PolicyState{});
  const fs::path empty = dir / "empty_policy.json";
  std::ofstream(empty) << untrained.dump();
  EXPECT_NE(run("field " + empty.string()), 0);
}

TEST_F(CliTest, ServeShutsDownCleanlyOnSigterm) {
  const fs::path logs = dir / "service";
  const pid_t pid = fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    execl(ILOSA_CLI_PATH, ILOSA_CLI_PATH, "--quiet", "serve", "--listen", "127.0.0.1:0",
          "--log-dir", logs.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(500));
  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_TRUE(fs::exists(logs / "manifest.json"));
}

TEST_F(CliTest, ServeFailsOnBusyPort) {
  const int fd = socket(AF_INET, SOCK_STREAM, 0);
  ASSERT_GE(fd, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ASSERT_EQ(bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
  ASSERT_EQ(listen(fd, 1), 0);
  socklen_t len = sizeof addr;
  getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  const std::string port = std::to_string(ntohs(addr.sin_port));
  const fs::path config = dir / "service.json";
  std::ofstream(config) << R"({"service": {"listen": "127.0.0.1:)" << port << R"("}})";
  // A server that did bind would run until the timeout (exit 124).
  const std::string cmd = "timeout 10 " + std::string(ILOSA_CLI_PATH) + " --config " +
                          config.string() + " serve >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  close(fd);
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 3);
}

TEST_F(CliTest, TrainThenField) {
  const auto demo = ilosa::teacher::scripted_demo("unplug", 0, 1).trajectory;
  const fs::path csv = dir / "demo.csv";
  ilosa::policy::write_demo_csv(demo, csv.string());
  const fs::path policy = dir / "policy.json";
  ASSERT_EQ(run("--out " + policy.string() + " train " + csv.string()), 0);
  EXPECT_EQ(ilosa::policy::load_policy(policy.string()).size(),
            static_cast<Eigen::Index>(demo.size() - 1));

  const fs::path field = dir / "field.csv";
  ASSERT_EQ(run("--out " + field.string() + " field " + policy.string() +
                " --slice-axis 1 --resolution 6,4"),
            0);
  std::ifstream in(field);
  std::string line;
  int rows = 0;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("x,y,fx,fy", 0), 0u);
  while (std::getline(in, line)) rows += !line.empty();
  EXPECT_EQ(rows, 24);
  EXPECT_EQ(run("field " + policy.string() + " --resolution 0,4"), 2);
}

}  // namespace
