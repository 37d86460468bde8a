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


#ifndef OPTMOTION_SAMPLER_H_
#define OPTMOTION_SAMPLER_H_

#include <string>
#include <vector>

#include "optmotion/dmp.h"
#include "optmotion/dynamics.h"
#include "optmotion/ocp.h"
#include "optmotion/trajectory.h"
#include "optmotion/value_estimation.h"

namespace optmotion {

// Axis-aligned box of admissible goal states. Degenerate boxes (lower == upper
// in some coordinates) describe lines and planes.
struct Box {
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool Contains(const Vector& x, double tolerance = 1e-9) const;
};

void ValidateBox(const Box& box);

// Everything needed to turn a goal state into a learned anchor: the optimal
// control problem template, the DMP tuning and the rollout resolution.
struct AnchorSettings {
  SystemDynamics dynamics;
  Vector x0;
  double tf = 8.0;
  RunningCost cost;
  int n_intervals = 80;
  InputPin input_pin = InputPin::kInitialNode;  // of the forward problem
  DmpParams dmp;            // tau is taken from tf
  int rollout_steps = 800;  // rollout step is tf / rollout_steps
  InitialInputRule initial_input_rule = InitialInputRule::kQuadraticExtrapolation;
  SolveOptions solve;

  DmpParams dmp_params() const;
  double rollout_dt() const { return tf / rollout_steps; }
  OcpProblem ForwardProblem(const Vector& xf) const;
};

void ValidateSettings(const AnchorSettings& settings);

struct AnchorBuild {
  Dmp dmp;
  Trajectory backward;  // optimal solution of the backward problem
  Trajectory forward;   // the same solution read forward in time
  double reproduction_gap = 0.0;  // gap of the DMP reproducing its own anchor
  double residual_bound = 0.0;    // bound on that gap implied by the fit residual
};

// Solves the backward problem for xf, learns the DMP from the reversed optimal
// trajectory and stores the value anchor (cost and gradient) on it.
// Throws SolverStateError when the solver does not converge.
AnchorBuild BuildAnchor(const AnchorSettings& settings, const Vector& xf);

ValueAnchor AnchorValue(const Dmp& dmp);

// Rolls the DMP out towards `query`, recovers its inputs and compares its
// cost with the first-order estimate from the DMP's own anchor.
SuboptimalityReport Generalize(const AnchorSettings& settings, const Dmp& dmp,
                               const Vector& query, Trajectory* trajectory = nullptr);

// First-order bound on the cost error of a DMP reproducing its training
// trajectory. A critically damped DMP has a nonnegative impulse response
// integrating to 1/kappa, so each state error stays below
// max|forcing residual| / kappa. That bound is pushed through the path cost
// (inputs recovered by finite differences) and the quadrature mismatch
// against the solver cost is added.
double LearningResidualBound(const Dmp& dmp, const Trajectory& forward_optimal,
                             const SystemDynamics& dynamics, const RunningCost& cost);

struct SamplerConfig {
  Vector start;
  Vector direction;
  Box region;
  double j_threshold = 10.0;
  int t_samples = 15;
  double delta_x = 0.2;
  int t_steps = 5;
};

void ValidateSamplerConfig(const SamplerConfig& config);

enum class TraceKind { kAnchor, kStep, kRegionExit, kBudgetExhausted, kAborted };

const char* TraceKindName(TraceKind kind);

struct TraceEvent {
  TraceKind kind = TraceKind::kStep;
  Vector point;
  double coordinate = 0.0;  // signed offset from the start along the direction
  int anchor = -1;          // index of the anchor in effect
  int steps = 0;            // completed steps since that anchor
  double gap = 0.0;         // kStep only
  bool reanchor = false;    // kStep only: this step triggered a new anchor
  std::string detail;
};

// Grid of anchors over the span of orthogonal unit directions through
// `origin`. Anchors are stored row-major over `coordinates` (last direction
// fastest); every coordinate list is strictly increasing.
struct SampleGrid {
  Box region;
  Vector origin;
  std::vector<Vector> directions;
  std::vector<std::vector<double>> coordinates;
  std::vector<Dmp> anchors;

  int size() const { return static_cast<int>(anchors.size()); }
  int axis_count() const { return static_cast<int>(directions.size()); }
  Vector NodePoint(const std::vector<int>& index) const;
  int FlatIndex(const std::vector<int>& index) const;
};

void ValidateGrid(const SampleGrid& grid);

struct AnchorRecord {
  double coordinate = 0.0;
  // distances on either side of the anchor over which generalization was
  // checked and accepted, measured along the grid direction
  double accepted_forward = 0.0;
  double accepted_backward = 0.0;
  double reproduction_gap = 0.0;
  double residual_bound = 0.0;
};

struct DirectionResult {
  SampleGrid grid;                    // one axis
  std::vector<AnchorRecord> records;  // parallel to grid.anchors
  std::vector<TraceEvent> trace;
  bool aborted = false;
  std::string error;
};

// Adaptive sampling along one direction. A non-converging anchor solve aborts
// the direction and returns the grid built so far with `aborted` set.
// `start_anchor`, when given, is reused for the start point instead of
// solving again; `budget` overrides config.t_samples when positive.
DirectionResult SampleDirection(const SamplerConfig& config,
                                const AnchorSettings& settings,
                                const AnchorBuild* start_anchor = nullptr, int budget = 0);

// Samples both senses of config.direction from the start, sharing one budget
// of config.t_samples anchors, and merges them into a single axis.
DirectionResult SampleLine(const SamplerConfig& config, const AnchorSettings& settings);

// Cartesian product of single-axis grids sharing an origin. Product nodes
// that are not already anchors are solved and learned. Throws BudgetError
// before any solve when the product exceeds `budget`.
SampleGrid BuildGrid(const std::vector<SampleGrid>& axes, const AnchorSettings& settings,
                     int budget);

enum class BlendMode { kMultilinear, kCostWeighted };

inline constexpr double kCostWeightEpsilon = 1e-9;

int NearestAnchor(const SampleGrid& grid, const Vector& query);

struct QueryResult {
  Dmp blended;
  Trajectory trajectory;  // with recovered inputs
  SuboptimalityReport report;
  std::vector<int> vertices;   // flat anchor indices of the enclosing cell
  std::vector<double> weights;  // blend weights, parallel to vertices
  int nearest = -1;
  bool clamped = false;  // query lies beyond the outermost anchors
};

// Blends the DMPs of the cell enclosing `query`, rolls the blend out and
// estimates its suboptimality from the nearest anchor. Throws
// OutOfRegionError outside the grid's region or affine span.
QueryResult Query(const SampleGrid& grid, const AnchorSettings& settings, const Vector& query,
                  BlendMode mode = BlendMode::kMultilinear);

}  // namespace optmotion

#endif  // OPTMOTION_SAMPLER_H_
