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


#include "optmotion/sampler.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "optmotion/errors.h"

namespace optmotion {
namespace {

constexpr double kGeometryTolerance = 1e-9;

std::string PointString(const Vector& x) {
  std::ostringstream out;
  out << "(";
  for (int i = 0; i < x.size(); ++i) out << (i ? ", " : "") << FormatDouble(x(i));
  out << ")";
  return out.str();
}

std::vector<int> Unflatten(const SampleGrid& grid, int flat) {
  std::vector<int> index(grid.axis_count());
  for (int d = grid.axis_count() - 1; d >= 0; --d) {
    const int count = static_cast<int>(grid.coordinates[d].size());
    index[d] = flat % count;
    flat /= count;
  }
  return index;
}

// Generalization that blows up is treated as infinitely suboptimal.
double GeneralizationGap(const AnchorSettings& settings, const Dmp& dmp, const Vector& point,
                         std::string* detail) {
  try {
    return Generalize(settings, dmp, point).gap;
  } catch (const NumericalError& error) {
    *detail = error.what();
    return std::numeric_limits<double>::infinity();
  }
}

// Solver failures at an anchor end a sampling direction instead of the run.
std::optional<AnchorBuild> TryBuildAnchor(const AnchorSettings& settings, const Vector& xf,
                                          std::string* error) {
  try {
    return BuildAnchor(settings, xf);
  } catch (const SolverStateError& e) {
    *error = e.what();
  } catch (const NumericalError& e) {
    *error = e.what();
  }
  return std::nullopt;
}

}  // namespace

bool Box::Contains(const Vector& x, double tolerance) const {
  if (x.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    const double slack = tolerance * (1.0 + std::max(std::abs(lower(i)), std::abs(upper(i))));
    if (!(x(i) >= lower(i) - slack && x(i) <= upper(i) + slack)) return false;
  }
  return true;
}

void ValidateBox(const Box& box) {
  if (box.lower.size() == 0 || box.lower.size() != box.upper.size()) {
    throw ContractError("region bounds must be nonempty and of equal dimension");
  }
  if (!box.lower.allFinite() || !box.upper.allFinite()) {
    throw ContractError("region bounds must be finite");
  }
  if ((box.upper - box.lower).minCoeff() < 0.0) {
    throw ContractError("region lower bound exceeds its upper bound");
  }
}

DmpParams AnchorSettings::dmp_params() const {
  DmpParams params = dmp;
  params.tau = tf;
  return params;
}

OcpProblem AnchorSettings::ForwardProblem(const Vector& xf) const {
  OcpProblem problem = MakeProblem(dynamics, x0, xf, tf, cost.R, n_intervals);
  problem.cost = cost;
  problem.input_pin = input_pin;
  return problem;
}

void ValidateSettings(const AnchorSettings& settings) {
  ValidateProblem(settings.ForwardProblem(settings.x0));
  ValidateParams(settings.dmp_params());
  if (settings.rollout_steps < 3) throw ContractError("rollout needs at least three steps");
  if (!settings.dynamics.has_inverse()) {
    throw CapabilityError("sampling needs the actuation inverse of '" +
                          settings.dynamics.name + "'");
  }
}

AnchorBuild BuildAnchor(const AnchorSettings& settings, const Vector& xf) {
  const OcpProblem forward_problem = settings.ForwardProblem(xf);
  AnchorBuild build;
  build.backward = Solve(ReverseProblem(forward_problem), std::nullopt, settings.solve);
  if (!build.backward.converged) {
    std::ostringstream message;
    message << "optimal control solve did not converge for goal " << PointString(xf)
            << " (violation " << build.backward.report.constraint_violation
            << ", stationarity " << build.backward.report.stationarity << ")";
    throw SolverStateError(message.str());
  }
  build.forward = ReverseTrajectory(build.backward, settings.tf);
  build.dmp = LearnWeights(build.forward, settings.dmp_params());
  build.dmp.xf_anchor = xf;
  build.dmp.anchor_cost = build.backward.cost;
  build.dmp.anchor_value_gradient = ValueGradientAtAnchor(
      build.backward, settings.dynamics, settings.cost.R, settings.initial_input_rule);
  build.reproduction_gap = Generalize(settings, build.dmp, xf).gap;
  build.residual_bound =
      LearningResidualBound(build.dmp, build.forward, settings.dynamics, settings.cost);
  return build;
}

ValueAnchor AnchorValue(const Dmp& dmp) {
  return ValueAnchor{dmp.xf_anchor, dmp.anchor_cost, dmp.anchor_value_gradient};
}

SuboptimalityReport Generalize(const AnchorSettings& settings, const Dmp& dmp,
                               const Vector& query, Trajectory* trajectory) {
  const Trajectory rollout = Rollout(dmp, query, settings.rollout_dt(), settings.tf);
  Trajectory recovered = RecoverInput(rollout, settings.dynamics, settings.cost);
  SuboptimalityReport report =
      Suboptimality(recovered, settings.cost, AnchorValue(dmp), query);
  if (trajectory) *trajectory = std::move(recovered);
  return report;
}

double LearningResidualBound(const Dmp& dmp, const Trajectory& forward_optimal,
                             const SystemDynamics& dynamics, const RunningCost& cost) {
  if (dmp.fit_residual_max.size() != dmp.state_dim()) {
    throw ContractError("DMP carries no per-dimension fit residual");
  }
  const Vector state_error = dmp.fit_residual_max / dmp.params.stiffness;
  Trajectory path = forward_optimal;
  path.inputs.clear();
  auto path_cost = [&](const Trajectory& t) { return RecoverInput(t, dynamics, cost).cost; };
  const double base = path_cost(path);

  double bound = std::abs(base - forward_optimal.cost);
  for (int k = 0; k < path.size(); ++k) {
    for (int i = 0; i < path.state_dim(); ++i) {
      double& x = path.states[k](i);
      const double original = x;
      const double h = 1e-6 * std::max(1.0, std::abs(original));
      x = original + h;
      const double plus = path_cost(path);
      x = original - h;
      const double minus = path_cost(path);
      x = original;
      bound += std::abs(plus - minus) / (2.0 * h) * state_error(i);
    }
  }
  return bound;
}

void ValidateSamplerConfig(const SamplerConfig& config) {
  ValidateBox(config.region);
  const int n = config.region.dim();
  if (config.start.size() != n || config.direction.size() != n) {
    throw ContractError("start, direction and region must share one dimension");
  }
  if (!config.direction.allFinite() ||
      std::abs(config.direction.norm() - 1.0) > kGeometryTolerance) {
    throw ContractError("sampling direction must be a unit vector");
  }
  if (!config.region.Contains(config.start)) {
    throw ContractError("sampling start " + PointString(config.start) +
                        " lies outside the region");
  }
  if (!(config.delta_x > 0.0) || !std::isfinite(config.delta_x)) {
    throw ContractError("step length must be positive");
  }
  if (config.t_samples < 1) throw ContractError("sample budget must be at least one");
  if (config.t_steps < 1) throw ContractError("step limit must be at least one");
  if (std::isnan(config.j_threshold) || !(config.j_threshold > 0.0)) {
    throw ContractError("gap threshold must be positive");
  }
}

const char* TraceKindName(TraceKind kind) {
  switch (kind) {
    case TraceKind::kAnchor:
      return "anchor";
    case TraceKind::kStep:
      return "step";
    case TraceKind::kRegionExit:
      return "region_exit";
    case TraceKind::kBudgetExhausted:
      return "budget_exhausted";
    case TraceKind::kAborted:
      return "aborted";
  }
  return "unknown";
}

Vector SampleGrid::NodePoint(const std::vector<int>& index) const {
  Vector point = origin;
  for (int d = 0; d < axis_count(); ++d) point += coordinates[d][index[d]] * directions[d];
  return point;
}

int SampleGrid::FlatIndex(const std::vector<int>& index) const {
  int flat = 0;
  for (int d = 0; d < axis_count(); ++d) {
    flat = flat * static_cast<int>(coordinates[d].size()) + index[d];
  }
  return flat;
}

void ValidateGrid(const SampleGrid& grid) {
  ValidateBox(grid.region);
  const int n = grid.region.dim();
  if (grid.origin.size() != n) throw ContractError("grid origin has the wrong dimension");
  if (grid.directions.empty() || grid.directions.size() != grid.coordinates.size()) {
    throw ContractError("grid needs one coordinate list per direction");
  }
  std::size_t count = 1;
  for (int d = 0; d < grid.axis_count(); ++d) {
    const Vector& v = grid.directions[d];
    if (v.size() != n || std::abs(v.norm() - 1.0) > kGeometryTolerance) {
      throw ContractError("grid directions must be unit vectors");
    }
    for (int e = 0; e < d; ++e) {
      if (std::abs(v.dot(grid.directions[e])) > kGeometryTolerance) {
        throw ContractError("grid directions must be mutually orthogonal");
      }
    }
    const auto& c = grid.coordinates[d];
    if (c.empty()) throw ContractError("grid axis without anchors");
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (!(c[i] > c[i - 1])) {
        throw ContractError("anchor coordinates must increase strictly along each direction");
      }
    }
    count *= c.size();
  }
  if (grid.anchors.size() != count) {
    throw ContractError("grid holds " + std::to_string(grid.anchors.size()) +
                        " anchors but its axes span " + std::to_string(count));
  }
  for (const Dmp& dmp : grid.anchors) {
    if (dmp.state_dim() != n) throw ContractError("anchor DMP has the wrong dimension");
  }
}

DirectionResult SampleDirection(const SamplerConfig& config, const AnchorSettings& settings,
                                const AnchorBuild* start_anchor, int budget) {
  ValidateSamplerConfig(config);
  ValidateSettings(settings);
  if (settings.x0.size() != config.region.dim()) {
    throw ContractError("region dimension differs from the state dimension");
  }
  const Vector v = config.direction.normalized();
  const int limit = budget > 0 ? budget : config.t_samples;

  DirectionResult result;
  result.grid.region = config.region;
  result.grid.origin = config.start;
  result.grid.directions = {v};
  result.grid.coordinates = {{}};

  auto emit = [&](TraceKind kind, double coordinate, int steps, double gap, bool reanchor,
                  std::string detail) {
    TraceEvent event;
    event.kind = kind;
    event.coordinate = coordinate;
    event.point = config.start + coordinate * v;
    event.anchor = result.grid.size() - 1;
    event.steps = steps;
    event.gap = gap;
    event.reanchor = reanchor;
    event.detail = std::move(detail);
    result.trace.push_back(std::move(event));
  };

  double anchor_coordinate = 0.0;
  while (true) {
    const Vector anchor_point = config.start + anchor_coordinate * v;
    AnchorBuild build;
    if (result.grid.size() == 0 && start_anchor != nullptr) {
      build = *start_anchor;
    } else {
      std::optional<AnchorBuild> built = TryBuildAnchor(settings, anchor_point, &result.error);
      if (!built) {
        result.aborted = true;
        emit(TraceKind::kAborted, anchor_coordinate, 0, 0.0, false, result.error);
        return result;
      }
      build = std::move(*built);
    }
    AnchorRecord record;
    record.coordinate = anchor_coordinate;
    record.reproduction_gap = build.reproduction_gap;
    record.residual_bound = build.residual_bound;
    result.grid.coordinates[0].push_back(anchor_coordinate);
    result.grid.anchors.push_back(std::move(build.dmp));
    result.records.push_back(record);
    emit(TraceKind::kAnchor, anchor_coordinate, 0, build.reproduction_gap, false, "");

    if (result.grid.size() >= limit) {
      emit(TraceKind::kBudgetExhausted, anchor_coordinate, 0, 0.0, false, "");
      return result;
    }

    const Dmp& current = result.grid.anchors.back();
    for (int steps = 1;; ++steps) {
      const double coordinate = anchor_coordinate + steps * config.delta_x;
      const Vector point = config.start + coordinate * v;
      if (!config.region.Contains(point)) {
        emit(TraceKind::kRegionExit, coordinate, steps, 0.0, false, "");
        return result;
      }
      std::string detail;
      const double gap = GeneralizationGap(settings, current, point, &detail);
      const bool reanchor = gap >= config.j_threshold || steps >= config.t_steps;
      emit(TraceKind::kStep, coordinate, steps, gap, reanchor, detail);
      if (reanchor) {
        anchor_coordinate = coordinate;
        break;
      }
      result.records.back().accepted_forward = steps * config.delta_x;
    }
  }
}

DirectionResult SampleLine(const SamplerConfig& config, const AnchorSettings& settings) {
  ValidateSamplerConfig(config);
  ValidateSettings(settings);
  const Vector v = config.direction.normalized();

  DirectionResult merged;
  merged.grid.region = config.region;
  merged.grid.origin = config.start;
  merged.grid.directions = {v};
  merged.grid.coordinates = {{}};

  std::optional<AnchorBuild> built = TryBuildAnchor(settings, config.start, &merged.error);
  if (!built) {
    merged.aborted = true;
    TraceEvent event;
    event.kind = TraceKind::kAborted;
    event.point = config.start;
    event.detail = merged.error;
    merged.trace.push_back(event);
    return merged;
  }
  const AnchorBuild start = std::move(*built);

  SamplerConfig forward = config;
  forward.direction = v;
  const DirectionResult plus =
      SampleDirection(forward, settings, &start, (config.t_samples + 1) / 2);
  SamplerConfig backward = config;
  backward.direction = -v;
  const DirectionResult minus =
      SampleDirection(backward, settings, &start, config.t_samples - plus.grid.size() + 1);

  // minus anchors (past the shared start) in reverse, then all plus anchors
  const int extra = minus.grid.size() - 1;
  for (int j = extra; j >= 1; --j) {
    AnchorRecord record = minus.records[j];
    record.coordinate = -record.coordinate;
    std::swap(record.accepted_forward, record.accepted_backward);
    merged.grid.coordinates[0].push_back(record.coordinate);
    merged.grid.anchors.push_back(minus.grid.anchors[j]);
    merged.records.push_back(record);
  }
  for (int i = 0; i < plus.grid.size(); ++i) {
    merged.grid.coordinates[0].push_back(plus.records[i].coordinate);
    merged.grid.anchors.push_back(plus.grid.anchors[i]);
    merged.records.push_back(plus.records[i]);
  }
  merged.records[extra].accepted_backward = minus.records.front().accepted_forward;

  for (TraceEvent event : plus.trace) {
    if (event.anchor >= 0) event.anchor += extra;
    merged.trace.push_back(std::move(event));
  }
  for (TraceEvent event : minus.trace) {
    event.coordinate = -event.coordinate;
    if (event.anchor >= 0) event.anchor = extra - event.anchor;
    merged.trace.push_back(std::move(event));
  }
  merged.aborted = plus.aborted || minus.aborted;
  merged.error = plus.error;
  if (!minus.error.empty()) merged.error += (merged.error.empty() ? "" : "; ") + minus.error;
  return merged;
}

SampleGrid BuildGrid(const std::vector<SampleGrid>& axes, const AnchorSettings& settings,
                     int budget) {
  if (axes.empty()) throw ContractError("grid product needs at least one axis");
  SampleGrid grid;
  grid.origin = axes.front().origin;
  grid.region = axes.front().region;
  std::vector<int> zero_index;
  for (const SampleGrid& axis : axes) {
    ValidateGrid(axis);
    if (axis.axis_count() != 1) throw ContractError("grid product expects single-axis grids");
    if (axis.origin.size() != grid.origin.size() ||
        (axis.origin - grid.origin).norm() > kGeometryTolerance * (1.0 + grid.origin.norm())) {
      throw ContractError("grid axes must share one origin");
    }
    const auto& c = axis.coordinates.front();
    const auto zero = std::find(c.begin(), c.end(), 0.0);
    if (zero == c.end()) throw ContractError("grid axis does not contain its origin");
    zero_index.push_back(static_cast<int>(zero - c.begin()));
    grid.directions.push_back(axis.directions.front());
    grid.coordinates.push_back(c);
    grid.region.lower = grid.region.lower.cwiseMin(axis.region.lower);
    grid.region.upper = grid.region.upper.cwiseMax(axis.region.upper);
  }
  std::size_t count = 1;
  for (const auto& c : grid.coordinates) count *= c.size();
  if (budget < 1 || count > static_cast<std::size_t>(budget)) {
    throw BudgetError("grid product needs " + std::to_string(count) +
                      " anchors, budget is " + std::to_string(budget));
  }
  // validates orthogonality before any solve
  grid.anchors.assign(count, axes.front().anchors[zero_index.front()]);
  ValidateGrid(grid);

  for (std::size_t flat = 0; flat < count; ++flat) {
    const std::vector<int> index = Unflatten(grid, static_cast<int>(flat));
    int off_origin_axis = -1;
    int off_origin_count = 0;
    for (int d = 0; d < grid.axis_count(); ++d) {
      if (index[d] != zero_index[d]) {
        off_origin_axis = d;
        ++off_origin_count;
      }
    }
    if (off_origin_count == 0) {
      grid.anchors[flat] = axes.front().anchors[zero_index.front()];
    } else if (off_origin_count == 1) {
      grid.anchors[flat] = axes[off_origin_axis].anchors[index[off_origin_axis]];
    } else {
      grid.anchors[flat] = BuildAnchor(settings, grid.NodePoint(index)).dmp;
    }
  }
  return grid;
}

int NearestAnchor(const SampleGrid& grid, const Vector& query) {
  int best = -1;
  double best_distance = std::numeric_limits<double>::infinity();
  for (int flat = 0; flat < grid.size(); ++flat) {
    const double distance = (grid.NodePoint(Unflatten(grid, flat)) - query).norm();
    if (distance < best_distance) {
      best_distance = distance;
      best = flat;
    }
  }
  return best;
}

QueryResult Query(const SampleGrid& grid, const AnchorSettings& settings, const Vector& query,
                  BlendMode mode) {
  ValidateGrid(grid);
  if (query.size() != grid.region.dim()) throw ContractError("query has the wrong dimension");
  if (!query.allFinite()) throw ContractError("query must be finite");
  if (!grid.region.Contains(query)) {
    throw OutOfRegionError("query " + PointString(query) + " lies outside the sampled region");
  }
  const Vector offset = query - grid.origin;
  Vector in_span = Vector::Zero(offset.size());
  std::vector<double> along(grid.axis_count());
  for (int d = 0; d < grid.axis_count(); ++d) {
    along[d] = grid.directions[d].dot(offset);
    in_span += along[d] * grid.directions[d];
  }
  if ((offset - in_span).norm() > kGeometryTolerance * (1.0 + offset.norm())) {
    throw OutOfRegionError("query " + PointString(query) + " lies off the sampled span");
  }

  QueryResult result;
  std::vector<int> lower(grid.axis_count());
  std::vector<double> fraction(grid.axis_count(), 0.0);
  std::vector<bool> spans(grid.axis_count(), false);
  for (int d = 0; d < grid.axis_count(); ++d) {
    const auto& c = grid.coordinates[d];
    double t = along[d];
    for (double node : c) {
      if (std::abs(t - node) <= kGeometryTolerance * (1.0 + std::abs(node))) t = node;
    }
    if (t < c.front() || t > c.back()) result.clamped = true;
    if (c.size() == 1) {
      lower[d] = 0;
      continue;
    }
    const int i = static_cast<int>(std::upper_bound(c.begin(), c.end(), t) - c.begin()) - 1;
    lower[d] = std::clamp(i, 0, static_cast<int>(c.size()) - 2);
    fraction[d] = std::clamp((t - c[lower[d]]) / (c[lower[d] + 1] - c[lower[d]]), 0.0, 1.0);
    spans[d] = true;
  }

  const int corners = 1 << grid.axis_count();
  for (int corner = 0; corner < corners; ++corner) {
    std::vector<int> index = lower;
    double weight = 1.0;
    bool valid = true;
    for (int d = 0; d < grid.axis_count(); ++d) {
      const bool upper = (corner >> d) & 1;
      if (upper && !spans[d]) {
        valid = false;
        break;
      }
      index[d] += upper ? 1 : 0;
      weight *= upper ? fraction[d] : 1.0 - fraction[d];
    }
    if (!valid) continue;
    result.vertices.push_back(grid.FlatIndex(index));
    result.weights.push_back(weight);
  }
  if (mode == BlendMode::kCostWeighted) {
    double total = 0.0;
    for (std::size_t k = 0; k < result.vertices.size(); ++k) {
      result.weights[k] = 1.0 / (grid.anchors[result.vertices[k]].anchor_cost + kCostWeightEpsilon);
      total += result.weights[k];
    }
    for (double& w : result.weights) w /= total;
  }

  result.nearest = NearestAnchor(grid, query);
  const Dmp& nearest = grid.anchors[result.nearest];
  Dmp blended = nearest;
  blended.weights.setZero();
  blended.initial_velocity.setZero();
  for (std::size_t k = 0; k < result.vertices.size(); ++k) {
    const Dmp& vertex = grid.anchors[result.vertices[k]];
    if (vertex.params.tau != nearest.params.tau ||
        vertex.params.basis_count != nearest.params.basis_count) {
      throw ContractError("grid anchors use different DMP parameters");
    }
    blended.weights += result.weights[k] * vertex.weights;
    blended.initial_velocity += result.weights[k] * vertex.initial_velocity;
  }
  result.blended = std::move(blended);
  const Trajectory rollout =
      Rollout(result.blended, query, settings.rollout_dt(), settings.tf);
  result.trajectory = RecoverInput(rollout, settings.dynamics, settings.cost);
  result.report =
      Suboptimality(result.trajectory, settings.cost, AnchorValue(nearest), query);
  return result;
}

}  // namespace optmotion
