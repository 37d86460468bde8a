// Copyright 2026 The optmotion Authors
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


#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "optmotion/config.h"
#include "optmotion/io.h"
#include "optmotion/sampler.h"
#include "optmotion/trajectory.h"

#ifndef OPTMOTION_CLI
#error "OPTMOTION_CLI must name the command line binary"
#endif

namespace optmotion {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int exit_code = -1;
  std::string out;
};

CliRun Cli(const std::string& arguments) {
  const std::string command = std::string(OPTMOTION_CLI) + " " + arguments + " 2>/dev/null";
  CliRun run;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return run;
  char buffer[4096];
  while (std::fgets(buffer, sizeof(buffer), pipe) != nullptr) run.out += buffer;
  const int status = pclose(pipe);
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return run;
}

// value of "key = value" in CLI output
std::string Field(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
  }
  return "";
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    directory_ = fs::temp_directory_path() / (std::string("optmotion_cli_") + info->name());
    fs::remove_all(directory_);
    fs::create_directories(directory_);
  }
  void TearDown() override { fs::remove_all(directory_); }

  std::string WriteConfig(const std::string& text) {
    const fs::path path = directory_ / "run.cfg";
    std::ofstream(path) << text;
    return path.string();
  }

  fs::path directory_;
};

constexpr char kIntegratorConfig[] = R"([system]
name = scalar_integrator
[ocp]
x0 = 0
xf = 1
tf = 1
R = 1
n_intervals = 40
input_pin = none
[dmp]
basis_count = 15
rollout_steps = 200
[sampler]
start = 0
direction = 1
region_lower = -1
region_upper = 1
j_threshold = 1e9
t_samples = 5
delta_x = 0.2
t_steps = 1
)";

TEST_F(CliTest, PrintConfigIsIdempotent) {
  const CliRun first = Cli("print-config");
  ASSERT_EQ(first.exit_code, 0);
  const std::string path = WriteConfig(first.out);
  const CliRun second = Cli("print-config -c " + path);
  ASSERT_EQ(second.exit_code, 0);
  EXPECT_EQ(first.out, second.out);
  EXPECT_NE(first.out.find("t_samples = 15"), std::string::npos);
}

TEST_F(CliTest, SolveWritesTheTrajectory) {
  const std::string out = (directory_ / "solve").string();
  const CliRun run = Cli("solve -s ocp.xf='6 5' -o " + out);
  ASSERT_EQ(run.exit_code, 0) << run.out;
  EXPECT_EQ(Field(run.out, "converged"), "true");
  std::ifstream csv(fs::path(out) / "trajectory.csv");
  const Trajectory trajectory = ReadTrajectoryCsv(csv);
  EXPECT_EQ(trajectory.size(), 81);
  EXPECT_NEAR(trajectory.states.back()(0), 6.0, 1e-6);
  EXPECT_EQ(ParseDouble(Field(run.out, "cost")),
            TrajectoryCost(trajectory, InputEnergyCost(Matrix::Identity(2, 2))));
}

TEST_F(CliTest, IntegratorCostIsExact) {
  const CliRun run = Cli("solve -c " + WriteConfig(kIntegratorConfig) + " -o " +
                      (directory_ / "lq").string());
  ASSERT_EQ(run.exit_code, 0) << run.out;
  EXPECT_NEAR(ParseDouble(Field(run.out, "cost")), 1.0, 1e-5);
}

TEST_F(CliTest, MalformedConfigExitsWithUsageAndWritesError) {
  const std::string out = (directory_ / "bad").string();
  const CliRun run = Cli("solve -c " + WriteConfig("[ocp]\nnonsense = 1\n") + " -o " + out);
  EXPECT_EQ(run.exit_code, 2);
  std::ifstream error(fs::path(out) / "error.json");
  ASSERT_TRUE(error.good());
  std::stringstream text;
  text << error.rdbuf();
  EXPECT_NE(text.str().find("parse"), std::string::npos);
  EXPECT_EQ(Cli("frobnicate").exit_code, 2);
  EXPECT_EQ(Cli("solve -s ocp.tf=-1 -o " + out).exit_code, 2);
}

TEST_F(CliTest, NonConvergenceExitsWithNumericalCode) {
  const CliRun run = Cli("solve -s solver.max_outer_iterations=1 -s ocp.xf='8 3' -o " +
                      (directory_ / "limit").string());
  EXPECT_EQ(run.exit_code, 1);
  EXPECT_EQ(Field(run.out, "converged"), "false");
}

TEST_F(CliTest, SampleThenQueryMatchesTheLibrary) {
  const std::string config = WriteConfig(kIntegratorConfig);
  const std::string out = (directory_ / "sample").string();
  const CliRun sample = Cli("sample -c " + config + " -o " + out);
  ASSERT_EQ(sample.exit_code, 0) << sample.out;
  EXPECT_EQ(Field(sample.out, "anchors"), "5");
  const std::string grid = (fs::path(out) / "grid").string();
  EXPECT_TRUE(fs::exists(fs::path(out) / "trace.csv"));

  const CliRun at_anchor = Cli("query -c " + config + " -g " + grid + " -x 0.2 -o " + out);
  ASSERT_EQ(at_anchor.exit_code, 0) << at_anchor.out;
  EXPECT_NE(at_anchor.out.find("weight 1\n"), std::string::npos);

  const CliRun midpoint = Cli("query -c " + config + " -g " + grid + " -x 0.1 -o " + out);
  ASSERT_EQ(midpoint.exit_code, 0);
  EXPECT_EQ(ParseDouble(Field(midpoint.out, "blend_weight_sum")), 1.0);
  EXPECT_NE(midpoint.out.find("weight 0.5\n"), std::string::npos);

  std::istringstream text(kIntegratorConfig);
  const AnchorSettings settings = SettingsFromConfig(ParseConfig(text));
  const QueryResult library = Query(LoadGrid(grid), settings, Vector::Constant(1, 0.1));
  EXPECT_EQ(ParseDouble(Field(midpoint.out, "dmp_cost")), library.report.dmp_cost);
  EXPECT_EQ(ParseDouble(Field(midpoint.out, "gap")), library.report.gap);

  EXPECT_EQ(Cli("query -c " + config + " -g " + grid + " -x 0.1 -o " + out).out, midpoint.out);
  EXPECT_EQ(Cli("query -c " + config + " -g " + grid + " -x 3 -o " + out).exit_code, 2);
  EXPECT_EQ(Cli("query -c " + config + " -g " + (directory_ / "missing").string() +
                " -x 0.1 -o " + out)
                .exit_code,
            2);
}

TEST_F(CliTest, SamplingIsDeterministic) {
  const std::string config = WriteConfig(kIntegratorConfig);
  const CliRun a = Cli("sample -c " + config + " -o " + (directory_ / "a").string());
  const CliRun b = Cli("sample -c " + config + " -o " + (directory_ / "b").string());
  ASSERT_EQ(a.exit_code, 0);
  std::ifstream trace_a(directory_ / "a" / "trace.csv");
  std::ifstream trace_b(directory_ / "b" / "trace.csv");
  std::stringstream text_a, text_b;
  text_a << trace_a.rdbuf();
  text_b << trace_b.rdbuf();
  EXPECT_EQ(text_a.str(), text_b.str());
  EXPECT_FALSE(text_a.str().empty());
}

}  // namespace
}  // namespace optmotion
