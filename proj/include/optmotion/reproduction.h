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


#ifndef OPTMOTION_REPRODUCTION_H_
#define OPTMOTION_REPRODUCTION_H_

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "optmotion/config.h"
#include "optmotion/sampler.h"

namespace optmotion {

// Points start + k * spacing * direction (k integer) inside the region,
// ordered along the direction.
std::vector<Vector> LinePoints(const Box& region, const Vector& start, const Vector& direction,
                               double spacing);

struct SweepOptions {
  bool oracle = true;  // fresh optimal control solve at every point
  int workers = 1;
  int trajectory_stride = 0;  // keep every k-th rollout sample; 0 keeps none
};

struct SweepRow {
  Vector query;
  int anchor = -1;  // nearest anchor, which also supplies the estimate
  SuboptimalityReport report;
  bool has_oracle = false;
  bool oracle_converged = false;
  double oracle_cost = std::numeric_limits<double>::quiet_NaN();
  Trajectory trajectory;  // subsampled rollout when requested
};

// Generalizes the nearest anchor's DMP to every point and optionally solves
// the optimal control problem there for comparison. Rows come back in input
// order regardless of the worker count.
std::vector<SweepRow> Sweep(const SampleGrid& grid, const AnchorSettings& settings,
                            const std::vector<Vector>& points, const SweepOptions& options);

// Smallest distance between neighbouring anchors along any axis.
double MinimumSpacing(const SampleGrid& grid);

// Nodes of a uniform grid with the given spacing needed to cover a segment.
int UniformNodeCount(double extent, double spacing);

struct Reproduction {
  DirectionResult sampling;
  std::vector<SweepRow> sweep;
  double min_spacing = 0.0;
  double grid_extent = 0.0;      // span of the adaptive grid
  double region_extent = 0.0;    // span of the region along the direction
  int uniform_grid_count = 0;    // uniform nodes covering the adaptive grid's span
  int uniform_region_count = 0;  // uniform nodes covering the whole region line
  int oracle_failures = 0;
  double max_estimate_error = std::numeric_limits<double>::quiet_NaN();
};

// Samples the configured line, then sweeps it at the configured spacing.
Reproduction RunReproduction(const RunConfig& config, int trajectory_stride = 0);

// Writes the sweep and grid artifacts into `directory` and returns the file
// names written.
std::vector<std::string> WriteReproduction(const Reproduction& reproduction,
                                           const std::filesystem::path& directory);

std::string FormatTrace(const std::vector<TraceEvent>& trace);

}  // namespace optmotion

#endif  // OPTMOTION_REPRODUCTION_H_
