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

#ifndef OPTMOTION_OCP_H_
#define OPTMOTION_OCP_H_

#include <optional>

#include "optmotion/dynamics.h"
#include "optmotion/nlp.h"
#include "optmotion/trajectory.h"

namespace optmotion {

// kBackward is the time-reversed problem  zdot = -f(z) - g(z) v.
enum class Direction { kForward, kBackward };

// Node whose input is pinned to zero. The admissible inputs satisfy
// u(0) = 0; under time reversal that condition moves to the final node.
enum class InputPin { kInitialNode, kFinalNode, kNone };

// Fixed-endpoint problem
//   min  int_0^tf Q(x) + u^T R u dt
//   s.t. xdot = s (f(x) + g(x) u),  x(0) = x0,  x(tf) = xf
// with s = +1 (forward) or -1 (backward).
struct OcpProblem {
  SystemDynamics dynamics;
  Vector x0;
  Vector xf;
  double tf = 8.0;
  RunningCost cost;
  int n_intervals = 80;
  Direction direction = Direction::kForward;
  InputPin input_pin = InputPin::kInitialNode;

  double sign() const { return direction == Direction::kForward ? 1.0 : -1.0; }
  double step() const { return tf / n_intervals; }
};

// Throws ContractError on dimension mismatches, tf <= 0, n_intervals < 2 or
// an invalid R.
void ValidateProblem(const OcpProblem& problem);

// Problem with the given running cost and Q == 0 (L = u^T R u).
OcpProblem MakeProblem(SystemDynamics dynamics, Vector x0, Vector xf, double tf,
                       const Matrix& R, int n_intervals = 80);

// Trapezoidal direct collocation on a uniform grid of n_intervals + 1 nodes.
// Variables are ordered node by node as (x_k, u_k). Constraints, in order:
// collocation defects (n per interval), x_0 - x0, x_N - xf, and the pinned
// input (m, absent for InputPin::kNone).
class TrapezoidalTranscription : public EqualityNlp {
 public:
  explicit TrapezoidalTranscription(OcpProblem problem);

  int num_variables() const override;
  int num_constraints() const override;
  int num_nodes() const { return problem_.n_intervals + 1; }

  double Objective(const Vector& w) const override;
  Vector ObjectiveGradient(const Vector& w) const override;
  Vector Constraints(const Vector& w) const override;
  Vector ConstraintJacobianTransposeTimes(const Vector& w,
                                          const Vector& y) const override;

  // straight line between x0 and xf, zero inputs
  Vector StraightLineGuess() const;
  // resamples a trajectory onto this grid by linear interpolation in time
  Vector PackGuess(const Trajectory& trajectory) const;
  Trajectory Unpack(const Vector& w) const;

  const OcpProblem& problem() const { return problem_; }

 private:
  int StateOffset(int node) const { return node * (n_ + m_); }
  int InputOffset(int node) const { return node * (n_ + m_) + n_; }
  int pinned_node() const;

  OcpProblem problem_;
  int n_;
  int m_;
  double h_;
};

TrapezoidalTranscription Transcribe(const OcpProblem& problem);

struct SolveOptions {
  AugmentedLagrangianOptions nlp;
};

// Solves the problem by transcription. The returned trajectory has
// converged == false when the solver tolerances were not met; its cost is the
// trapezoidal quadrature of L over the solution nodes.
Trajectory Solve(const OcpProblem& problem,
                 const std::optional<Trajectory>& initial_guess = std::nullopt,
                 const SolveOptions& options = {});

// Swaps the boundary states, flips the direction and moves the pinned input
// to the mirrored node. Applying it twice returns the original data.
OcpProblem ReverseProblem(const OcpProblem& problem);

// Maps sample k to sample last - k with times t -> tf - t (ascending).
Trajectory ReverseTrajectory(const Trajectory& trajectory, double tf);

}  // namespace optmotion

#endif  // OPTMOTION_OCP_H_
