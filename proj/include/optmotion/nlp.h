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

#ifndef OPTMOTION_NLP_H_
#define OPTMOTION_NLP_H_

#include <functional>

#include "optmotion/dynamics.h"

namespace optmotion {

// min f(w)  s.t.  c(w) = 0
class EqualityNlp {
 public:
  virtual ~EqualityNlp() = default;

  virtual int num_variables() const = 0;
  virtual int num_constraints() const = 0;

  virtual double Objective(const Vector& w) const = 0;
  virtual Vector ObjectiveGradient(const Vector& w) const = 0;
  virtual Vector Constraints(const Vector& w) const = 0;
  // J(w)^T y, with J the constraint Jacobian
  virtual Vector ConstraintJacobianTransposeTimes(const Vector& w,
                                                  const Vector& y) const = 0;
};

struct LbfgsOptions {
  int memory = 20;
  int max_iterations = 5000;
  double gradient_tolerance = 1e-6;  // infinity norm
};

struct LbfgsResult {
  Vector x;
  double value = 0.0;
  Vector gradient;
  int iterations = 0;
  bool converged = false;
};

// value_and_gradient returns f(x) and writes grad f(x); it may return a
// non-finite value, which the line search treats as "step too long".
using ValueAndGradient = std::function<double(const Vector& x, Vector* gradient)>;

// Limited-memory BFGS with a strong Wolfe line search. Throws NumericalError
// when the starting point has a non-finite value or gradient.
LbfgsResult MinimizeLbfgs(const ValueAndGradient& value_and_gradient, Vector x0,
                          const LbfgsOptions& options);

struct AugmentedLagrangianOptions {
  double initial_penalty = 1.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e10;
  int max_outer_iterations = 20;
  double feasibility_tolerance = 1e-6;
  double stationarity_tolerance = 1e-5;
  // Penalty grows when the violation does not shrink by this factor.
  double required_violation_decrease = 0.25;
  // Newton projection onto the constraints after convergence
  bool polish = true;
  LbfgsOptions inner;
};

struct NlpResult {
  Vector w;
  Vector multipliers;
  double objective = 0.0;
  double constraint_violation = 0.0;
  double stationarity = 0.0;
  double penalty = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
};

// Method of multipliers on
//   phi(w) = f(w) + lambda^T c(w) + (mu / 2) ||c(w)||^2
// with L-BFGS for the inner minimizations. Returns the last iterate with
// converged == false when the tolerances are not met; throws NumericalError
// when the problem evaluates to NaN/Inf at the returned point.
// Throws ContractError for nonpositive tolerances, limits or penalties.
void ValidateOptions(const AugmentedLagrangianOptions& options);

NlpResult SolveAugmentedLagrangian(const EqualityNlp& nlp, Vector w0,
                                   const AugmentedLagrangianOptions& options,
                                   Vector multipliers0 = Vector());

}  // namespace optmotion

#endif  // OPTMOTION_NLP_H_
