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


// Command-line front end: solve, sample, reproduce-example, query and
// print-config. Exit codes: 0 success, 1 numerical failure, 2 usage or
// configuration error. Failures also emit a one-line JSON error record on
// stderr and, when an output directory is known, in `error.json`.

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "optmotion/config.h"
#include "optmotion/errors.h"
#include "optmotion/io.h"
#include "optmotion/ocp.h"
#include "optmotion/reproduction.h"
#include "optmotion/sampler.h"

namespace optmotion {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
};

struct Failure {
  int exit_code;
  std::string kind;
  std::string message;
};

RunConfig BuildConfig(const CommonOptions& options) {
  RunConfig config = options.config_path.empty() ? RunConfig() : LoadConfig(options.config_path);
  for (const std::string& entry : options.overrides) {
    const auto equals = entry.find('=');
    const auto dot = entry.find('.');
    if (equals == std::string::npos || dot == std::string::npos || dot > equals) {
      throw ParseError("override '" + entry + "' must look like section.key=value");
    }
    SetConfigValue(config, entry.substr(0, dot), entry.substr(dot + 1, equals - dot - 1),
                   entry.substr(equals + 1));
  }
  if (!options.output.empty()) config.output_directory = options.output;
  return config;
}

std::filesystem::path PrepareOutput(const RunConfig& config) {
  const std::filesystem::path directory(config.output_directory);
  std::filesystem::create_directories(directory);
  return directory;
}

std::string Join(const Vector& values) {
  std::string text;
  for (int i = 0; i < values.size(); ++i) text += (i ? " " : "") + FormatDouble(values(i));
  return text;
}

int RunSolve(const RunConfig& config) {
  ValidateConfig(config);
  const OcpProblem problem = ProblemFromConfig(config);
  SolveOptions options;
  options.nlp = config.nlp;
  const Trajectory solution = Solve(problem, std::nullopt, options);
  const auto directory = PrepareOutput(config);
  WriteTrajectoryCsv(solution, (directory / "trajectory.csv").string());
  const SolverReport& report = solution.report;
  std::cout << "cost = " << FormatDouble(solution.cost) << "\n"
            << "converged = " << (solution.converged ? "true" : "false") << "\n"
            << "nodes = " << solution.size() << "\n"
            << "outer_iterations = " << report.outer_iterations << "\n"
            << "inner_iterations = " << report.inner_iterations << "\n"
            << "constraint_violation = " << FormatDouble(report.constraint_violation) << "\n"
            << "stationarity = " << FormatDouble(report.stationarity) << "\n"
            << "penalty = " << FormatDouble(report.penalty) << "\n"
            << "trajectory = " << (directory / "trajectory.csv").string() << "\n";
  if (!solution.converged) {
    throw SolverStateError("optimal control solve did not converge");
  }
  return kExitOk;
}

int RunSample(const RunConfig& config) {
  ValidateSamplingConfig(config);
  const AnchorSettings settings = SettingsFromConfig(config);
  const SamplerConfig sampler = SamplerFromConfig(config);
  const DirectionResult result =
      config.both_senses ? SampleLine(sampler, settings) : SampleDirection(sampler, settings);
  const auto directory = PrepareOutput(config);
  {
    std::ofstream trace(directory / "trace.csv");
    trace << FormatTrace(result.trace);
  }
  if (result.grid.size() > 0) SaveGrid(result.grid, directory / "grid");
  std::cout << "anchors = " << result.grid.size() << "\n";
  for (int k = 0; k < result.grid.size(); ++k) {
    const Dmp& dmp = result.grid.anchors[k];
    std::cout << "anchor " << k << " xf = " << Join(dmp.xf_anchor)
              << " cost = " << FormatDouble(dmp.anchor_cost)
              << " gradient = " << Join(dmp.anchor_value_gradient) << "\n";
  }
  std::cout << "grid = " << (directory / "grid").string() << "\n";
  if (result.aborted) throw SolverStateError("sampling aborted: " + result.error);
  return kExitOk;
}

int RunReproduce(const RunConfig& config) {
  const Reproduction reproduction = RunReproduction(config, 10);
  const auto directory = PrepareOutput(config);
  const std::vector<std::string> files = WriteReproduction(reproduction, directory);
  const SampleGrid& grid = reproduction.sampling.grid;
  std::cout << "anchors = " << grid.size() << "\n";
  std::cout << "anchor_x =";
  for (const Dmp& dmp : grid.anchors) std::cout << " (" << Join(dmp.xf_anchor) << ")";
  std::cout << "\n"
            << "min_spacing = " << FormatDouble(reproduction.min_spacing) << "\n"
            << "uniform_nodes_over_grid = " << reproduction.uniform_grid_count << "\n"
            << "uniform_nodes_over_region = " << reproduction.uniform_region_count << "\n";
  if (config.oracle) {
    std::cout << "max_estimate_error = " << FormatDouble(reproduction.max_estimate_error)
              << " (reference 1.07)\n"
              << "oracle_failures = " << reproduction.oracle_failures << "\n";
  }
  for (const std::string& file : files) std::cout << "wrote " << (directory / file).string() << "\n";
  if (reproduction.sampling.aborted) {
    throw SolverStateError("sampling aborted: " + reproduction.sampling.error);
  }
  return kExitOk;
}

int RunQuery(const RunConfig& config, const std::string& grid_path, const std::string& point,
             const std::optional<std::string>& mode) {
  RunConfig effective = config;
  if (mode) SetConfigValue(effective, "query", "blend", *mode);
  ValidateSamplingConfig(effective);
  const SampleGrid grid = LoadGrid(grid_path);
  Vector query;
  {
    std::istringstream in(point);
    std::vector<double> values;
    std::string token;
    while (in >> token) values.push_back(ParseDouble(token));
    query = Eigen::Map<Vector>(values.data(), values.size());
  }
  const AnchorSettings settings = SettingsFromConfig(effective);
  const QueryResult result = Query(grid, settings, query, effective.blend);
  const auto directory = PrepareOutput(effective);
  WriteTrajectoryCsv(result.trajectory, (directory / "query_trajectory.csv").string());
  {
    std::ofstream report(directory / "query_report.csv");
    report << SuboptimalityCsvHeader(static_cast<int>(query.size())) << "\n";
    WriteSuboptimalityCsvRow(result.report, report);
  }
  std::cout << "nearest_anchor = " << result.nearest << "\n";
  double total = 0.0;
  for (std::size_t k = 0; k < result.vertices.size(); ++k) {
    std::cout << "blend anchor " << result.vertices[k] << " weight "
              << FormatDouble(result.weights[k]) << "\n";
    total += result.weights[k];
  }
  std::cout << "blend_weight_sum = " << FormatDouble(total) << "\n"
            << "clamped = " << (result.clamped ? "true" : "false") << "\n"
            << "dmp_cost = " << FormatDouble(result.report.dmp_cost) << "\n"
            << "estimate = " << FormatDouble(result.report.estimated_optimal_cost) << "\n"
            << "gap = " << FormatDouble(result.report.gap) << "\n"
            << "distance = " << FormatDouble(result.report.goal_distance) << "\n";
  return kExitOk;
}

template <typename T>
bool Is(const std::exception& error) {
  return dynamic_cast<const T*>(&error) != nullptr;
}

Failure Classify(const std::exception& error) {
  const std::string message = error.what();
  if (Is<ParseError>(error)) return {kExitUsage, "parse", message};
  if (Is<OutOfRegionError>(error)) return {kExitUsage, "out_of_region", message};
  if (Is<BudgetError>(error)) return {kExitUsage, "budget", message};
  if (Is<ContractError>(error)) return {kExitUsage, "contract", message};
  if (Is<CapabilityError>(error)) return {kExitUsage, "capability", message};
  if (Is<std::filesystem::filesystem_error>(error)) return {kExitUsage, "io", message};
  if (Is<SolverStateError>(error)) return {kExitNumerical, "solver", message};
  if (Is<IllPosedError>(error)) return {kExitNumerical, "ill_posed", message};
  if (Is<NumericalError>(error)) return {kExitNumerical, "numerical", message};
  return {kExitNumerical, "internal", message};
}

int Report(const Failure& failure, const std::string& command, const std::string& output) {
  nlohmann::json record = {{"command", command},
                           {"error", failure.kind},
                           {"exit_code", failure.exit_code},
                           {"message", failure.message}};
  std::cerr << record.dump() << "\n";
  if (!output.empty()) {
    std::error_code ignored;
    std::filesystem::create_directories(output, ignored);
    std::ofstream file(std::filesystem::path(output) / "error.json");
    if (file) file << record.dump(2) << "\n";
  }
  return failure.exit_code;
}

}  // namespace

int Main(int argc, char** argv) {
  CLI::App app{"Learning optimal control with dynamic movement primitives"};
  app.require_subcommand(1);
  CommonOptions common;
  auto add_common = [&](CLI::App* command, bool output) {
    command->add_option("-c,--config", common.config_path, "Config file (key = value sections)");
    command->add_option("-s,--set", common.overrides, "Override one field: section.key=value");
    if (output) command->add_option("-o,--output", common.output, "Output directory");
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve one optimal control problem");
  add_common(solve, true);

  CLI::App* sample = app.add_subcommand("sample", "Run adaptive sampling and store the grid");
  add_common(sample, true);

  CLI::App* reproduce =
      app.add_subcommand("reproduce-example", "Sample, sweep and write the example artifacts");
  add_common(reproduce, true);
  std::optional<bool> oracle;
  std::optional<int> workers;
  reproduce->add_flag("--oracle,!--no-oracle", oracle, "Solve the true optimum at sweep points");
  reproduce->add_option("-j,--workers", workers, "Worker threads for the sweep")
      ->check(CLI::PositiveNumber);

  CLI::App* query = app.add_subcommand("query", "Blend a stored grid at a goal state");
  add_common(query, true);
  std::string grid_path;
  std::string point;
  std::optional<std::string> mode;
  query->add_option("-g,--grid", grid_path, "Grid directory")->required();
  query->add_option("-x,--xq", point, "Goal state, space separated")->required();
  query->add_option("-m,--mode", mode, "multilinear or cost_weighted");

  CLI::App* print = app.add_subcommand("print-config", "Print the effective configuration");
  add_common(print, false);

  std::string command = argc > 1 ? argv[1] : "";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForAllHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& error) {
    app.exit(error);
    return Report({kExitUsage, "usage", error.what()}, command, "");
  }

  std::string output = common.output;
  try {
    RunConfig config = BuildConfig(common);
    if (oracle) config.oracle = *oracle;
    if (workers) config.workers = *workers;
    output = config.output_directory;
    if (*print) {
      output.clear();
      std::cout << FormatConfig(config);
      return kExitOk;
    }
    if (*solve) return RunSolve(config);
    if (*sample) return RunSample(config);
    if (*reproduce) return RunReproduce(config);
    if (*query) return RunQuery(config, grid_path, point, mode);
  } catch (const std::exception& error) {
    return Report(Classify(error), command, output);
  }
  return kExitUsage;
}

}  // namespace optmotion

int main(int argc, char** argv) { return optmotion::Main(argc, argv); }
