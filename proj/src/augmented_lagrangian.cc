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

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "optmotion/errors.h"
#include "optmotion/nlp.h"

namespace optmotion {

void ValidateOptions(const AugmentedLagrangianOptions& options) {
  if (!(options.initial_penalty > 0.0)) throw ContractError("initial penalty must be positive");
  if (!(options.penalty_growth > 1.0)) throw ContractError("penalty growth must exceed 1");
  if (!(options.max_penalty >= options.initial_penalty)) {
    throw ContractError("max penalty must be at least the initial penalty");
  }
  if (options.max_outer_iterations < 1 || options.inner.max_iterations < 1) {
    throw ContractError("iteration limits must be positive");
  }
  if (options.inner.memory < 1) throw ContractError("L-BFGS memory must be positive");
  if (!(options.feasibility_tolerance > 0.0) || !(options.stationarity_tolerance > 0.0) ||
      !(options.inner.gradient_tolerance > 0.0)) {
    throw ContractError("solver tolerances must be positive");
  }
}

namespace {

constexpr int kPolishIterations = 4;

// Gauss-Newton projection w <- w - A^T (A A^T)^{-1} c. An augmented
// Lagrangian iterate leaves residuals of one sign, which bias the objective by
// about lambda^T c; projecting removes that bias to first order. Steps that do
// not reduce the violation are rejected.
void ProjectOntoConstraints(const EqualityNlp& nlp, Vector* w, Vector* c) {
  const int m = nlp.num_constraints();
  for (int iteration = 0; iteration < kPolishIterations && m > 0; ++iteration) {
    const double violation = c->lpNorm<Eigen::Infinity>();
    if (violation == 0.0) return;
    Matrix jacobian_t(nlp.num_variables(), m);
    for (int i = 0; i < m; ++i) {
      jacobian_t.col(i) = nlp.ConstraintJacobianTransposeTimes(*w, Vector::Unit(m, i));
    }
    const Eigen::LDLT<Matrix> gram(jacobian_t.transpose() * jacobian_t);
    if (gram.info() != Eigen::Success) return;
    const Vector trial = *w - jacobian_t * gram.solve(*c);
    const Vector trial_c = nlp.Constraints(trial);
    if (!trial.allFinite() || !trial_c.allFinite() ||
        !(trial_c.lpNorm<Eigen::Infinity>() < violation)) {
      return;
    }
    *w = trial;
    *c = trial_c;
  }
}

Vector LagrangianGradient(const EqualityNlp& nlp, const Vector& w, const Vector& lambda) {
  return nlp.ObjectiveGradient(w) + nlp.ConstraintJacobianTransposeTimes(w, lambda);
}

double KktResidual(const EqualityNlp& nlp, const Vector& w, const Vector& lambda) {
  return std::max(LagrangianGradient(nlp, w, lambda).lpNorm<Eigen::Infinity>(),
                  nlp.Constraints(w).lpNorm<Eigen::Infinity>());
}

// Newton steps on the first-order conditions [grad L; c] = 0. The Lagrangian
// Hessian comes from central differences of its gradient; each step must
// lower the KKT residual or it is discarded.
void NewtonKktSteps(const EqualityNlp& nlp, Vector* w, Vector* lambda) {
  const int n = nlp.num_variables();
  const int m = nlp.num_constraints();
  double residual = KktResidual(nlp, *w, *lambda);
  for (int iteration = 0; iteration < kPolishIterations && residual > 0.0; ++iteration) {
    Matrix kkt = Matrix::Zero(n + m, n + m);
    Vector probe = *w;
    for (int j = 0; j < n; ++j) {
      const double h = 1e-5 * std::max(1.0, std::abs(probe(j)));
      probe(j) = (*w)(j) + h;
      const Vector plus = LagrangianGradient(nlp, probe, *lambda);
      probe(j) = (*w)(j) - h;
      const Vector minus = LagrangianGradient(nlp, probe, *lambda);
      probe(j) = (*w)(j);
      kkt.block(0, j, n, 1) = (plus - minus) / (2.0 * h);
    }
    kkt.topLeftCorner(n, n) = 0.5 * (kkt.topLeftCorner(n, n) + kkt.topLeftCorner(n, n).transpose()).eval();
    for (int i = 0; i < m; ++i) {
      kkt.block(0, n + i, n, 1) = nlp.ConstraintJacobianTransposeTimes(*w, Vector::Unit(m, i));
    }
    kkt.bottomLeftCorner(m, n) = kkt.topRightCorner(n, m).transpose();

    Vector rhs(n + m);
    rhs << -LagrangianGradient(nlp, *w, *lambda), -nlp.Constraints(*w);
    const Vector step = kkt.partialPivLu().solve(rhs);
    if (!step.allFinite()) return;
    const Vector trial_w = *w + step.head(n);
    const Vector trial_lambda = *lambda + step.tail(m);
    const double trial_residual = KktResidual(nlp, trial_w, trial_lambda);
    if (!(trial_residual < residual)) return;
    *w = trial_w;
    *lambda = trial_lambda;
    residual = trial_residual;
  }
}

}  // namespace

NlpResult SolveAugmentedLagrangian(const EqualityNlp& nlp, Vector w0,
                                   const AugmentedLagrangianOptions& options,
                                   Vector multipliers0) {
  ValidateOptions(options);
  if (w0.size() != nlp.num_variables()) {
    throw ContractError("initial point has the wrong number of variables");
  }
  NlpResult result;
  result.w = std::move(w0);
  result.multipliers = multipliers0.size() == nlp.num_constraints()
                           ? std::move(multipliers0)
                           : Vector::Zero(nlp.num_constraints()).eval();
  double penalty = options.initial_penalty;

  Vector constraints = nlp.Constraints(result.w);
  double violation = constraints.lpNorm<Eigen::Infinity>();
  if (!std::isfinite(violation)) {
    throw NumericalError("constraints are not finite at the initial point");
  }
  // inner tolerance is tightened by 10x per outer iteration down to a floor
  // below the requested stationarity
  double inner_tolerance = 1.0;

  for (int outer = 0; outer < options.max_outer_iterations; ++outer) {
    const Vector& lambda = result.multipliers;
    auto merit = [&](const Vector& w, Vector* gradient) {
      const Vector c = nlp.Constraints(w);
      const double value = nlp.Objective(w) + lambda.dot(c) + 0.5 * penalty * c.squaredNorm();
      *gradient = nlp.ObjectiveGradient(w) +
                  nlp.ConstraintJacobianTransposeTimes(w, lambda + penalty * c);
      return value;
    };

    LbfgsOptions inner = options.inner;
    inner.gradient_tolerance =
        std::max(0.5 * options.stationarity_tolerance, inner_tolerance);
    LbfgsResult minimized = MinimizeLbfgs(merit, result.w, inner);
    result.inner_iterations += minimized.iterations;
    result.outer_iterations = outer + 1;
    result.w = std::move(minimized.x);

    constraints = nlp.Constraints(result.w);
    const double new_violation = constraints.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(new_violation)) {
      throw NumericalError("constraints became non-finite during the solve");
    }
    // after this update the Lagrangian gradient equals the merit gradient
    result.multipliers += penalty * constraints;
    result.stationarity = minimized.gradient.lpNorm<Eigen::Infinity>();

    if (new_violation > options.required_violation_decrease * violation) {
      penalty = std::min(options.max_penalty, penalty * options.penalty_growth);
    }
    violation = new_violation;
    inner_tolerance *= 0.1;

    if (violation < options.feasibility_tolerance &&
        result.stationarity < options.stationarity_tolerance) {
      result.converged = true;
      break;
    }
  }

  if (result.converged && options.polish) {
    Vector w = result.w;
    Vector c = constraints;
    Vector lambda = result.multipliers;
    ProjectOntoConstraints(nlp, &w, &c);
    NewtonKktSteps(nlp, &w, &lambda);
    c = nlp.Constraints(w);
    const double stationarity = LagrangianGradient(nlp, w, lambda).lpNorm<Eigen::Infinity>();
    if (c.lpNorm<Eigen::Infinity>() < options.feasibility_tolerance &&
        stationarity < options.stationarity_tolerance) {
      result.w = std::move(w);
      result.multipliers = std::move(lambda);
      violation = c.lpNorm<Eigen::Infinity>();
      result.stationarity = stationarity;
    }
  }

  result.constraint_violation = violation;
  result.penalty = penalty;
  result.objective = nlp.Objective(result.w);
  if (!std::isfinite(result.objective)) {
    throw NumericalError("objective is not finite at the returned point");
  }
  return result;
}

}  // namespace optmotion
