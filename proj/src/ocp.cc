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

#include "optmotion/ocp.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "optmotion/errors.h"

namespace optmotion {

void ValidateProblem(const OcpProblem& problem) {
  const SystemDynamics& dynamics = problem.dynamics;
  if (dynamics.state_dim <= 0 || dynamics.input_dim <= 0) {
    throw ContractError("system dimensions must be positive");
  }
  if (!dynamics.drift || !dynamics.actuation) {
    throw ContractError("system '" + dynamics.name + "' lacks drift or actuation");
  }
  if (problem.x0.size() != dynamics.state_dim || problem.xf.size() != dynamics.state_dim) {
    throw ContractError("boundary states do not match the state dimension");
  }
  if (!problem.x0.allFinite() || !problem.xf.allFinite()) {
    throw ContractError("boundary states must be finite");
  }
  if (!(problem.tf > 0.0) || !std::isfinite(problem.tf)) {
    throw ContractError("horizon tf must be positive");
  }
  if (problem.n_intervals < 2) throw ContractError("n_intervals must be at least 2");
  if (problem.cost.R.rows() != dynamics.input_dim) {
    throw ContractError("R does not match the input dimension");
  }
  ValidateInputWeight(problem.cost.R);
}

OcpProblem MakeProblem(SystemDynamics dynamics, Vector x0, Vector xf, double tf,
                       const Matrix& R, int n_intervals) {
  OcpProblem problem;
  problem.dynamics = std::move(dynamics);
  problem.x0 = std::move(x0);
  problem.xf = std::move(xf);
  problem.tf = tf;
  problem.cost = InputEnergyCost(R);
  problem.n_intervals = n_intervals;
  ValidateProblem(problem);
  return problem;
}

TrapezoidalTranscription::TrapezoidalTranscription(OcpProblem problem)
    : problem_(std::move(problem)) {
  ValidateProblem(problem_);
  n_ = problem_.dynamics.state_dim;
  m_ = problem_.dynamics.input_dim;
  h_ = problem_.step();
}

int TrapezoidalTranscription::pinned_node() const {
  switch (problem_.input_pin) {
    case InputPin::kInitialNode:
      return 0;
    case InputPin::kFinalNode:
      return problem_.n_intervals;
    case InputPin::kNone:
      break;
  }
  return -1;
}

int TrapezoidalTranscription::num_variables() const { return num_nodes() * (n_ + m_); }

int TrapezoidalTranscription::num_constraints() const {
  return problem_.n_intervals * n_ + 2 * n_ + (pinned_node() >= 0 ? m_ : 0);
}

double TrapezoidalTranscription::Objective(const Vector& w) const {
  const RunningCost& cost = problem_.cost;
  double total = 0.0;
  for (int k = 0; k < num_nodes(); ++k) {
    const double weight = (k == 0 || k == problem_.n_intervals) ? 0.5 * h_ : h_;
    total += weight * cost.Evaluate(w.segment(StateOffset(k), n_),
                                    w.segment(InputOffset(k), m_));
  }
  return total;
}

Vector TrapezoidalTranscription::ObjectiveGradient(const Vector& w) const {
  const RunningCost& cost = problem_.cost;
  Vector gradient = Vector::Zero(w.size());
  for (int k = 0; k < num_nodes(); ++k) {
    const double weight = (k == 0 || k == problem_.n_intervals) ? 0.5 * h_ : h_;
    const auto u = w.segment(InputOffset(k), m_);
    gradient.segment(InputOffset(k), m_) = weight * 2.0 * (cost.R * u);
    if (cost.has_state_cost()) {
      const Vector x = w.segment(StateOffset(k), n_);
      Vector q_gradient(n_);
      if (cost.state_cost_gradient) {
        q_gradient = cost.state_cost_gradient(x);
      } else {
        Vector perturbed = x;
        for (int i = 0; i < n_; ++i) {
          const double step = 1e-6 * std::max(1.0, std::abs(x(i)));
          perturbed(i) = x(i) + step;
          const double plus = cost.state_cost(perturbed);
          perturbed(i) = x(i) - step;
          const double minus = cost.state_cost(perturbed);
          perturbed(i) = x(i);
          q_gradient(i) = (plus - minus) / (2.0 * step);
        }
      }
      gradient.segment(StateOffset(k), n_) = weight * q_gradient;
    }
  }
  return gradient;
}

Vector TrapezoidalTranscription::Constraints(const Vector& w) const {
  const SystemDynamics& dynamics = problem_.dynamics;
  const double scale = 0.5 * h_ * problem_.sign();
  Vector c(num_constraints());
  Vector field_previous = EvalVectorField(dynamics, w.segment(StateOffset(0), n_),
                                          w.segment(InputOffset(0), m_));
  for (int k = 0; k < problem_.n_intervals; ++k) {
    Vector field_next = EvalVectorField(dynamics, w.segment(StateOffset(k + 1), n_),
                                        w.segment(InputOffset(k + 1), m_));
    c.segment(k * n_, n_) = w.segment(StateOffset(k + 1), n_) -
                            w.segment(StateOffset(k), n_) -
                            scale * (field_previous + field_next);
    field_previous = std::move(field_next);
  }
  int row = problem_.n_intervals * n_;
  c.segment(row, n_) = w.segment(StateOffset(0), n_) - problem_.x0;
  row += n_;
  c.segment(row, n_) = w.segment(StateOffset(problem_.n_intervals), n_) - problem_.xf;
  row += n_;
  if (pinned_node() >= 0) c.segment(row, m_) = w.segment(InputOffset(pinned_node()), m_);
  return c;
}

Vector TrapezoidalTranscription::ConstraintJacobianTransposeTimes(const Vector& w,
                                                                  const Vector& y) const {
  const SystemDynamics& dynamics = problem_.dynamics;
  const double scale = 0.5 * h_ * problem_.sign();
  Vector product = Vector::Zero(w.size());
  for (int k = 0; k < num_nodes(); ++k) {
    const Vector x = w.segment(StateOffset(k), n_);
    const Vector u = w.segment(InputOffset(k), m_);
    // defect k-1 depends on node k through +x_k, defect k through -x_k; both
    // through -scale * F(x_k, u_k)
    Vector y_sum = Vector::Zero(n_);
    if (k > 0) {
      const auto y_prev = y.segment((k - 1) * n_, n_);
      product.segment(StateOffset(k), n_) += y_prev;
      y_sum += y_prev;
    }
    if (k < problem_.n_intervals) {
      const auto y_next = y.segment(k * n_, n_);
      product.segment(StateOffset(k), n_) -= y_next;
      y_sum += y_next;
    }
    const Matrix a = EvalStateJacobian(dynamics, x, u);
    const Matrix g = EvalActuation(dynamics, x);
    product.segment(StateOffset(k), n_) -= scale * (a.transpose() * y_sum);
    product.segment(InputOffset(k), m_) -= scale * (g.transpose() * y_sum);
  }
  int row = problem_.n_intervals * n_;
  product.segment(StateOffset(0), n_) += y.segment(row, n_);
  row += n_;
  product.segment(StateOffset(problem_.n_intervals), n_) += y.segment(row, n_);
  row += n_;
  if (pinned_node() >= 0) product.segment(InputOffset(pinned_node()), m_) += y.segment(row, m_);
  return product;
}

Vector TrapezoidalTranscription::StraightLineGuess() const {
  Vector w = Vector::Zero(num_variables());
  for (int k = 0; k < num_nodes(); ++k) {
    const double fraction = static_cast<double>(k) / problem_.n_intervals;
    w.segment(StateOffset(k), n_) = (1.0 - fraction) * problem_.x0 + fraction * problem_.xf;
  }
  return w;
}

Vector TrapezoidalTranscription::PackGuess(const Trajectory& trajectory) const {
  if (trajectory.size() < 2 || trajectory.state_dim() != n_) {
    throw ContractError("initial guess does not match the problem dimensions");
  }
  Vector w = Vector::Zero(num_variables());
  int segment = 0;
  for (int k = 0; k < num_nodes(); ++k) {
    const double t = k * h_;
    while (segment + 2 < trajectory.size() && trajectory.times[segment + 1] < t) ++segment;
    const double t0 = trajectory.times[segment];
    const double t1 = trajectory.times[segment + 1];
    const double fraction = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    w.segment(StateOffset(k), n_) = (1.0 - fraction) * trajectory.states[segment] +
                                    fraction * trajectory.states[segment + 1];
    if (trajectory.input_dim() == m_) {
      w.segment(InputOffset(k), m_) = (1.0 - fraction) * trajectory.inputs[segment] +
                                      fraction * trajectory.inputs[segment + 1];
    }
  }
  return w;
}

Trajectory TrapezoidalTranscription::Unpack(const Vector& w) const {
  Trajectory trajectory;
  trajectory.times.reserve(num_nodes());
  for (int k = 0; k < num_nodes(); ++k) {
    trajectory.times.push_back(k == problem_.n_intervals ? problem_.tf : k * h_);
    trajectory.states.push_back(w.segment(StateOffset(k), n_));
    trajectory.inputs.push_back(w.segment(InputOffset(k), m_));
  }
  trajectory.cost = TrajectoryCost(trajectory, problem_.cost);
  return trajectory;
}

TrapezoidalTranscription Transcribe(const OcpProblem& problem) {
  return TrapezoidalTranscription(problem);
}

Trajectory Solve(const OcpProblem& problem, const std::optional<Trajectory>& initial_guess,
                 const SolveOptions& options) {
  const TrapezoidalTranscription nlp(problem);
  Vector w0 = initial_guess ? nlp.PackGuess(*initial_guess) : nlp.StraightLineGuess();
  const NlpResult result = SolveAugmentedLagrangian(nlp, std::move(w0), options.nlp);
  Trajectory trajectory = nlp.Unpack(result.w);
  trajectory.converged = result.converged;
  trajectory.report.outer_iterations = result.outer_iterations;
  trajectory.report.inner_iterations = result.inner_iterations;
  trajectory.report.constraint_violation = result.constraint_violation;
  trajectory.report.stationarity = result.stationarity;
  trajectory.report.penalty = result.penalty;
  return trajectory;
}

OcpProblem ReverseProblem(const OcpProblem& problem) {
  OcpProblem reversed = problem;
  std::swap(reversed.x0, reversed.xf);
  reversed.direction = problem.direction == Direction::kForward ? Direction::kBackward
                                                                : Direction::kForward;
  switch (problem.input_pin) {
    case InputPin::kInitialNode:
      reversed.input_pin = InputPin::kFinalNode;
      break;
    case InputPin::kFinalNode:
      reversed.input_pin = InputPin::kInitialNode;
      break;
    case InputPin::kNone:
      break;
  }
  return reversed;
}

Trajectory ReverseTrajectory(const Trajectory& trajectory, double tf) {
  Trajectory reversed = trajectory;
  const int count = trajectory.size();
  for (int k = 0; k < count; ++k) {
    const int source = count - 1 - k;
    reversed.times[k] = tf - trajectory.times[source];
    reversed.states[k] = trajectory.states[source];
    if (trajectory.has_inputs()) reversed.inputs[k] = trajectory.inputs[source];
  }
  if (count > 0) reversed.times.front() = 0.0;
  return reversed;
}

}  // namespace optmotion
