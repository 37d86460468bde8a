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

#ifndef OPTMOTION_TRAJECTORY_H_
#define OPTMOTION_TRAJECTORY_H_

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "optmotion/dynamics.h"

namespace optmotion {

// Running cost L(x, u) = Q(x) + u^T R u. An empty state cost means Q == 0.
struct RunningCost {
  Matrix R;
  std::function<double(const Vector&)> state_cost;
  std::function<Vector(const Vector&)> state_cost_gradient;

  double Evaluate(const Vector& x, const Vector& u) const;
  bool has_state_cost() const { return static_cast<bool>(state_cost); }
};

// L = u^T R u
RunningCost InputEnergyCost(const Matrix& R);

// L = q |x|^2 + u^T R u with q > 0
RunningCost QuadraticStateCost(const Matrix& R, double q);

// Throws ContractError unless R is square, symmetric and positive definite.
void ValidateInputWeight(const Matrix& R);

struct SolverReport {
  int outer_iterations = 0;
  int inner_iterations = 0;
  double constraint_violation = 0.0;  // infinity norm
  double stationarity = 0.0;          // infinity norm of the Lagrangian gradient
  double penalty = 0.0;
};

// Time-stamped samples. inputs is either empty (a pure state path, e.g. a
// DMP rollout) or has one entry per state.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> inputs;
  double cost = 0.0;
  bool converged = false;
  SolverReport report;

  int size() const { return static_cast<int>(times.size()); }
  bool has_inputs() const { return !inputs.empty(); }
  int state_dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
  int input_dim() const { return inputs.empty() ? 0 : static_cast<int>(inputs.front().size()); }
};

// Trapezoidal quadrature of L over the trajectory's own grid.
double TrajectoryCost(const Trajectory& trajectory, const RunningCost& cost);

// Maximum over nodes of ||a.states[k] - b.states[k]||_inf; sizes must match.
double MaxStateDifference(const Trajectory& a, const Trajectory& b);

// Central differences on the interior, second-order one-sided differences at
// the ends. Requires a uniform grid with at least three samples.
std::vector<Vector> DifferentiateSamples(const std::vector<Vector>& samples,
                                         double step);
std::vector<Vector> SecondDifferenceSamples(const std::vector<Vector>& samples,
                                            double step);

// Returns the common spacing of times; throws ContractError when the grid is
// not uniform to a relative 1e-9.
double UniformStep(const std::vector<double>& times);

// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double value);

// Parses a whole token as a double; throws ParseError otherwise.
double ParseDouble(std::string_view token);

// CSV with header t,x1..xn,u1..um and one row per node.
void WriteTrajectoryCsv(const Trajectory& trajectory, std::ostream& out);
void WriteTrajectoryCsv(const Trajectory& trajectory, const std::string& path);

// Parses the format written by WriteTrajectoryCsv. The number of input
// columns is read from the header.
Trajectory ReadTrajectoryCsv(std::istream& in);

}  // namespace optmotion

#endif  // OPTMOTION_TRAJECTORY_H_
