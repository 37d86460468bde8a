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


#include "optmotion/reproduction.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>
#include <utility>

#include "optmotion/errors.h"
#include "optmotion/io.h"

namespace optmotion {
namespace {

// Parameter range of the line start + t * direction inside the region.
std::pair<double, double> LineRange(const Box& region, const Vector& start,
                                    const Vector& direction) {
  double low = -std::numeric_limits<double>::infinity();
  double high = std::numeric_limits<double>::infinity();
  for (int i = 0; i < region.dim(); ++i) {
    if (direction(i) == 0.0) continue;
    double a = (region.lower(i) - start(i)) / direction(i);
    double b = (region.upper(i) - start(i)) / direction(i);
    if (a > b) std::swap(a, b);
    low = std::max(low, a);
    high = std::min(high, b);
  }
  if (!std::isfinite(low) || !std::isfinite(high)) {
    throw ContractError("line direction must be nonzero");
  }
  return {low, high};
}

std::ofstream OpenCsv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string Columns(const std::string& prefix, int count) {
  std::string text;
  for (int i = 1; i <= count; ++i) text += "," + prefix + std::to_string(i);
  return text;
}

void WriteValues(std::ostream& out, const Vector& values) {
  for (int i = 0; i < values.size(); ++i) out << "," << FormatDouble(values(i));
}

}  // namespace

std::vector<Vector> LinePoints(const Box& region, const Vector& start, const Vector& direction,
                               double spacing) {
  ValidateBox(region);
  if (!(spacing > 0.0)) throw ContractError("sweep spacing must be positive");
  const auto [low, high] = LineRange(region, start, direction);
  const long first = static_cast<long>(std::ceil(low / spacing - 1e-9));
  const long last = static_cast<long>(std::floor(high / spacing + 1e-9));
  std::vector<Vector> points;
  for (long k = first; k <= last; ++k) {
    Vector point = start + (static_cast<double>(k) * spacing) * direction;
    points.push_back(point.cwiseMax(region.lower).cwiseMin(region.upper));
  }
  return points;
}

std::vector<SweepRow> Sweep(const SampleGrid& grid, const AnchorSettings& settings,
                            const std::vector<Vector>& points, const SweepOptions& options) {
  ValidateGrid(grid);
  if (options.workers < 1) throw ContractError("sweep needs at least one worker");
  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto work = [&]() {
    for (std::size_t k = next++; k < points.size() && !failed; k = next++) {
      try {
        SweepRow& row = rows[k];
        row.query = points[k];
        row.anchor = NearestAnchor(grid, row.query);
        Trajectory rollout;
        row.report = Generalize(settings, grid.anchors[row.anchor], row.query, &rollout);
        if (options.trajectory_stride > 0) {
          for (int s = 0; s < rollout.size(); s += options.trajectory_stride) {
            row.trajectory.times.push_back(rollout.times[s]);
            row.trajectory.states.push_back(rollout.states[s]);
          }
        }
        if (options.oracle) {
          const Trajectory optimal =
              Solve(settings.ForwardProblem(row.query), std::nullopt, settings.solve);
          row.has_oracle = true;
          row.oracle_converged = optimal.converged;
          row.oracle_cost = optimal.cost;
        }
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (options.workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < options.workers; ++w) pool.emplace_back(work);
    for (std::thread& thread : pool) thread.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

double MinimumSpacing(const SampleGrid& grid) {
  double spacing = std::numeric_limits<double>::infinity();
  for (const auto& c : grid.coordinates) {
    for (std::size_t i = 1; i < c.size(); ++i) spacing = std::min(spacing, c[i] - c[i - 1]);
  }
  return spacing;
}

int UniformNodeCount(double extent, double spacing) {
  if (!(spacing > 0.0)) throw ContractError("uniform spacing must be positive");
  if (!(extent > 0.0)) return 1;
  return static_cast<int>(std::ceil(extent / spacing - 1e-9)) + 1;
}

Reproduction RunReproduction(const RunConfig& config, int trajectory_stride) {
  ValidateSamplingConfig(config);
  const AnchorSettings settings = SettingsFromConfig(config);
  const SamplerConfig sampler = SamplerFromConfig(config);

  Reproduction result;
  result.sampling = config.both_senses ? SampleLine(sampler, settings)
                                       : SampleDirection(sampler, settings);
  const SampleGrid& grid = result.sampling.grid;
  if (grid.size() == 0) return result;

  const auto& c = grid.coordinates.front();
  result.grid_extent = c.back() - c.front();
  const auto [low, high] = LineRange(sampler.region, sampler.start, sampler.direction);
  result.region_extent = high - low;
  result.min_spacing = MinimumSpacing(grid);
  if (std::isfinite(result.min_spacing)) {
    result.uniform_grid_count = UniformNodeCount(result.grid_extent, result.min_spacing);
    result.uniform_region_count = UniformNodeCount(result.region_extent, result.min_spacing);
  }

  SweepOptions options;
  options.oracle = config.oracle;
  options.workers = config.workers;
  options.trajectory_stride = trajectory_stride;
  result.sweep = Sweep(grid, settings,
                       LinePoints(sampler.region, sampler.start, sampler.direction,
                                  config.sweep_spacing),
                       options);
  if (config.oracle) {
    double worst = 0.0;
    for (const SweepRow& row : result.sweep) {
      if (!row.oracle_converged) {
        ++result.oracle_failures;
        continue;
      }
      worst = std::max(worst, std::abs(row.report.estimated_optimal_cost - row.oracle_cost));
    }
    result.max_estimate_error = worst;
  }
  return result;
}

std::string FormatTrace(const std::vector<TraceEvent>& trace) {
  std::ostringstream out;
  const int n = trace.empty() ? 0 : static_cast<int>(trace.front().point.size());
  out << "kind,coordinate" << Columns("x", n) << ",anchor,steps,gap,reanchor,detail\n";
  for (const TraceEvent& event : trace) {
    out << TraceKindName(event.kind) << "," << FormatDouble(event.coordinate);
    WriteValues(out, event.point);
    out << "," << event.anchor << "," << event.steps << "," << FormatDouble(event.gap) << ","
        << (event.reanchor ? 1 : 0) << ",\"";
    for (char ch : event.detail) out << (ch == '"' ? '\'' : ch);
    out << "\"\n";
  }
  return out.str();
}

std::vector<std::string> WriteReproduction(const Reproduction& reproduction,
                                           const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  std::vector<std::string> written;
  const SampleGrid& grid = reproduction.sampling.grid;
  const int n = grid.region.dim();
  auto open = [&](const std::string& name) {
    written.push_back(name);
    return OpenCsv(directory / name);
  };

  {
    std::ofstream out = open("trace.csv");
    out << FormatTrace(reproduction.sampling.trace);
  }
  if (grid.size() > 0) {
    SaveGrid(grid, directory / "grid");
    written.push_back("grid/");
    std::ofstream out = open("fig3a_grid.csv");
    out << "index,coordinate" << Columns("xf_", n) << ",anchor_cost" << Columns("grad_", n)
        << ",fit_residual,reproduction_gap,residual_bound\n";
    for (int k = 0; k < grid.size(); ++k) {
      const Dmp& dmp = grid.anchors[k];
      const AnchorRecord& record = reproduction.sampling.records[k];
      out << k << "," << FormatDouble(grid.coordinates.front()[k]);
      WriteValues(out, dmp.xf_anchor);
      out << "," << FormatDouble(dmp.anchor_cost);
      WriteValues(out, dmp.anchor_value_gradient);
      out << "," << FormatDouble(dmp.fit_residual) << ","
          << FormatDouble(record.reproduction_gap) << "," << FormatDouble(record.residual_bound)
          << "\n";
    }
  }
  if (reproduction.uniform_grid_count > 0) {
    std::ofstream out = open("fig3b_uniform_grid.csv");
    out << "index" << Columns("x", n) << "\n";
    const double low = grid.coordinates.front().front();
    for (int k = 0; k < reproduction.uniform_grid_count; ++k) {
      out << k;
      WriteValues(out, grid.origin + (low + k * reproduction.min_spacing) * grid.directions[0]);
      out << "\n";
    }
  }
  if (!reproduction.sweep.empty()) {
    {
      std::ofstream out = open("sweep_report.csv");
      out << SuboptimalityCsvHeader(n) << "\n";
      for (const SweepRow& row : reproduction.sweep) WriteSuboptimalityCsvRow(row.report, out);
    }
    {
      std::ofstream out = open("fig2a_trajectories.csv");
      out << "query,anchor,t" << Columns("x", n) << "\n";
      for (std::size_t q = 0; q < reproduction.sweep.size(); ++q) {
        const SweepRow& row = reproduction.sweep[q];
        for (int s = 0; s < row.trajectory.size(); ++s) {
          out << q << "," << row.anchor << "," << FormatDouble(row.trajectory.times[s]);
          WriteValues(out, row.trajectory.states[s]);
          out << "\n";
        }
      }
    }
    if (reproduction.sweep.front().has_oracle) {
      std::ofstream b = open("fig2b_estimate_error.csv");
      std::ofstream c = open("fig2c_dmp_vs_optimal.csv");
      b << Columns("xq_", n).substr(1) << ",estimate,optimal_cost,error,oracle_converged\n";
      c << Columns("xq_", n).substr(1) << ",dmp_cost,optimal_cost,difference,oracle_converged\n";
      for (const SweepRow& row : reproduction.sweep) {
        std::ostringstream point;
        for (int i = 0; i < n; ++i) point << (i ? "," : "") << FormatDouble(row.query(i));
        const int converged = row.oracle_converged ? 1 : 0;
        b << point.str() << "," << FormatDouble(row.report.estimated_optimal_cost) << ","
          << FormatDouble(row.oracle_cost) << ","
          << FormatDouble(row.report.estimated_optimal_cost - row.oracle_cost) << ","
          << converged << "\n";
        c << point.str() << "," << FormatDouble(row.report.dmp_cost) << ","
          << FormatDouble(row.oracle_cost) << ","
          << FormatDouble(row.report.dmp_cost - row.oracle_cost) << "," << converged << "\n";
      }
    }
  }
  {
    std::ofstream out(directory / "summary.txt");
    written.push_back("summary.txt");
    out << "anchors = " << grid.size() << "\n";
    out << "aborted = " << (reproduction.sampling.aborted ? "true" : "false") << "\n";
    if (!reproduction.sampling.error.empty()) {
      out << "error = " << reproduction.sampling.error << "\n";
    }
    out << "min_spacing = " << FormatDouble(reproduction.min_spacing) << "\n";
    out << "grid_extent = " << FormatDouble(reproduction.grid_extent) << "\n";
    out << "uniform_nodes_over_grid = " << reproduction.uniform_grid_count << "\n";
    out << "uniform_nodes_over_region = " << reproduction.uniform_region_count << "\n";
    if (!std::isnan(reproduction.max_estimate_error)) {
      out << "max_estimate_error = " << FormatDouble(reproduction.max_estimate_error) << "\n";
      out << "oracle_failures = " << reproduction.oracle_failures << "\n";
    }
  }
  return written;
}

}  // namespace optmotion
