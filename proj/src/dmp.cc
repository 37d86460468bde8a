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

#include "optmotion/dmp.h"

#include <cmath>
#include <string>

#include "optmotion/errors.h"

namespace optmotion {

DmpParams CriticallyDampedParams(double tau, double damping, double alpha,
                                 int basis_count) {
  DmpParams params;
  params.tau = tau;
  params.damping = damping;
  params.stiffness = damping * damping / 4.0;
  params.alpha = alpha;
  params.basis_count = basis_count;
  ValidateParams(params);
  return params;
}

void ValidateParams(const DmpParams& params) {
  if (!(params.tau > 0.0) || !(params.damping > 0.0) || !(params.stiffness > 0.0) ||
      !(params.alpha > 0.0)) {
    throw ContractError("DMP tau, damping, stiffness and alpha must be positive");
  }
  if (params.basis_count < 2) throw ContractError("DMP needs at least two basis functions");
  const double critical = params.damping * params.damping / 4.0;
  if (std::abs(params.stiffness - critical) > 1e-12 * critical) {
    throw ContractError("DMP stiffness must equal damping^2 / 4");
  }
}

BasisSet MakeBasis(double alpha, int basis_count) {
  if (basis_count < 2) throw ContractError("DMP needs at least two basis functions");
  BasisSet basis;
  basis.centers.resize(basis_count);
  basis.widths.resize(basis_count);
  for (int j = 0; j < basis_count; ++j) {
    basis.centers[j] = std::exp(-alpha * j / (basis_count - 1.0));
  }
  for (int j = 0; j + 1 < basis_count; ++j) {
    const double gap = basis.centers[j + 1] - basis.centers[j];
    basis.widths[j] = 1.0 / (gap * gap);
  }
  basis.widths[basis_count - 1] = basis.widths[basis_count - 2];
  return basis;
}

Vector BasisActivations(const BasisSet& basis, double s) {
  Vector activations(basis.size());
  double total = 0.0;
  for (int j = 0; j < basis.size(); ++j) {
    const double offset = s - basis.centers[j];
    activations(j) = std::exp(-basis.widths[j] * offset * offset);
    total += activations(j);
  }
  if (!(total >= 1e-300)) {
    throw NumericalError("basis activations underflow at phase " + std::to_string(s));
  }
  return activations * (s / total);
}

double Clock(double t, const DmpParams& params) {
  if (t < 0.0) throw ContractError("clock time must be nonnegative");
  return std::exp(-(params.alpha / params.tau) * t);
}

Vector Forcing(const Dmp& dmp, double s) {
  return dmp.weights * BasisActivations(dmp.basis, s);
}

Dmp LearnWeights(const Trajectory& trajectory, const DmpParams& params) {
  ValidateParams(params);
  const int samples = trajectory.size();
  if (samples < params.basis_count) {
    throw IllPosedError("weight fit needs at least " + std::to_string(params.basis_count) +
                        " samples, got " + std::to_string(samples));
  }
  if (samples < 4) throw IllPosedError("weight fit needs at least four samples");
  const double step = UniformStep(trajectory.times);
  const int n = trajectory.state_dim();

  const std::vector<Vector> velocity = DifferentiateSamples(trajectory.states, step);
  const std::vector<Vector> acceleration = SecondDifferenceSamples(trajectory.states, step);

  Dmp dmp;
  dmp.params = params;
  dmp.basis = MakeBasis(params.alpha, params.basis_count);
  dmp.x0 = trajectory.states.front();
  dmp.xf_anchor = trajectory.states.back();
  dmp.initial_velocity = params.start_at_rest ? Vector::Zero(n).eval() : velocity.front();
  dmp.anchor_value_gradient = Vector::Zero(n);

  const double tau = params.tau;
  Matrix design(samples, params.basis_count);
  Matrix targets(samples, n);
  for (int k = 0; k < samples; ++k) {
    design.row(k) =
        BasisActivations(dmp.basis, Clock(trajectory.times[k] - trajectory.times[0], params))
            .transpose();
    targets.row(k) = (-tau * tau * acceleration[k] +
                      params.stiffness * (dmp.xf_anchor - trajectory.states[k]) -
                      params.damping * tau * velocity[k])
                         .transpose();
  }
  if (!targets.allFinite()) throw NumericalError("non-finite forcing targets");

  Matrix normal = design.transpose() * design;
  normal.diagonal().array() += kRidge;
  const Eigen::LDLT<Matrix> factorization(normal);
  if (factorization.info() != Eigen::Success) {
    throw NumericalError("weight normal equations could not be factorized");
  }
  dmp.weights = factorization.solve(design.transpose() * targets).transpose();
  if (!dmp.weights.allFinite()) throw NumericalError("non-finite DMP weights");

  const Matrix residual = design * dmp.weights.transpose() - targets;
  dmp.fit_residual = std::sqrt(residual.squaredNorm() / static_cast<double>(residual.size()));
  dmp.fit_residual_max = residual.cwiseAbs().colwise().maxCoeff().transpose();
  return dmp;
}

Trajectory Rollout(const Dmp& dmp, const Vector& goal, double dt, double horizon) {
  if (!(dt > 0.0)) throw ContractError("rollout step must be positive");
  if (!(horizon > 0.0)) throw ContractError("rollout horizon must be positive");
  if (goal.size() != dmp.state_dim()) throw ContractError("goal has the wrong dimension");

  const int steps = static_cast<int>(std::ceil(horizon / dt - 1e-9));
  const double h = horizon / steps;
  const DmpParams& params = dmp.params;
  const double tau2 = params.tau * params.tau;

  auto acceleration = [&](double t, const Vector& x, const Vector& v) {
    return Vector((params.stiffness * (goal - x) - params.damping * params.tau * v -
                   Forcing(dmp, Clock(t, params))) /
                  tau2);
  };

  Trajectory trajectory;
  trajectory.times.reserve(steps + 1);
  trajectory.states.reserve(steps + 1);
  Vector x = dmp.x0;
  Vector v = dmp.initial_velocity;
  trajectory.times.push_back(0.0);
  trajectory.states.push_back(x);
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const Vector a1 = acceleration(t, x, v);
    const Vector x2 = x + 0.5 * h * v;
    const Vector v2 = v + 0.5 * h * a1;
    const Vector a2 = acceleration(t + 0.5 * h, x2, v2);
    const Vector x3 = x + 0.5 * h * v2;
    const Vector v3 = v + 0.5 * h * a2;
    const Vector a3 = acceleration(t + 0.5 * h, x3, v3);
    const Vector x4 = x + h * v3;
    const Vector v4 = v + h * a3;
    const Vector a4 = acceleration(t + h, x4, v4);
    x += (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4);
    v += (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    if (!x.allFinite() || !v.allFinite()) throw NumericalError("DMP rollout overflowed");
    trajectory.times.push_back(k + 1 == steps ? horizon : (k + 1) * h);
    trajectory.states.push_back(x);
  }
  return trajectory;
}

double Deviation(const DmpParams& params, double t, double goal_distance) {
  ValidateParams(params);
  const double r = params.damping * t / (2.0 * params.tau);
  return std::abs(std::exp(-r) * (-r - 1.0) + 1.0) * goal_distance;
}

}  // namespace optmotion
