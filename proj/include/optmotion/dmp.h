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

#ifndef OPTMOTION_DMP_H_
#define OPTMOTION_DMP_H_

#include <vector>

#include "optmotion/dynamics.h"
#include "optmotion/trajectory.h"

namespace optmotion {

// Tuning of the transformation system
//   -tau^2 xddot + kappa (goal - x) - D tau xdot = F(s(t)),  s(t) = exp(-alpha t / tau)
struct DmpParams {
  double tau = 8.0;
  double damping = 20.0;     // D
  double stiffness = 100.0;  // kappa, always D^2 / 4
  double alpha = 3.0;
  int basis_count = 15;      // N
  // Roll out from rest instead of the training trajectory's initial velocity.
  bool start_at_rest = false;
};

// Critically damped parameters (stiffness = damping^2 / 4).
DmpParams CriticallyDampedParams(double tau, double damping = 20.0, double alpha = 3.0,
                                 int basis_count = 15);

// Throws ContractError unless all values are positive, basis_count >= 2 and
// stiffness == damping^2 / 4 (to a relative 1e-12).
void ValidateParams(const DmpParams& params);

// Gaussian basis over the phase: centers c_j = exp(-alpha (j-1)/(N-1)),
// widths h_j = (c_{j+1} - c_j)^-2 and h_N = h_{N-1}. One basis is shared by
// every state dimension.
struct BasisSet {
  std::vector<double> centers;
  std::vector<double> widths;

  int size() const { return static_cast<int>(centers.size()); }
};

BasisSet MakeBasis(double alpha, int basis_count);

// Normalized activations s psi_j(s) / sum_j psi_j(s); a row of the
// regression matrix.
Vector BasisActivations(const BasisSet& basis, double s);

struct Dmp {
  DmpParams params;
  BasisSet basis;
  Matrix weights;            // n x N
  Vector x0;
  Vector initial_velocity;   // zero when params.start_at_rest
  Vector xf_anchor;
  double anchor_cost = 0.0;
  Vector anchor_value_gradient;
  double fit_residual = 0.0;  // RMS forcing residual of the weight fit
  Vector fit_residual_max;    // per dimension, max |residual| over samples

  int state_dim() const { return static_cast<int>(weights.rows()); }
};

// exp(-(alpha / tau) t); t must be nonnegative.
double Clock(double t, const DmpParams& params);

// F(s) with F_i(s) = s sum_j w_ij psi_j(s) / sum_j psi_j(s).
Vector Forcing(const Dmp& dmp, double s);

inline constexpr double kRidge = 1e-8;

// Fits the weights to the forcing targets
//   -tau^2 xddot(t_k) + kappa (xf - x(t_k)) - D tau xdot(t_k)
// at every sample, with derivatives by finite differences on the (uniform)
// trajectory grid and one ridge least-squares problem per state dimension.
// x0 and xf_anchor are the trajectory endpoints; anchor cost and gradient are
// left for the caller. Throws IllPosedError when there are fewer samples than
// basis functions and NumericalError on non-finite targets.
Dmp LearnWeights(const Trajectory& trajectory, const DmpParams& params);

// Integrates the transformation system towards goal with fixed-step RK4 from
// x(0) = x0 and xdot(0) = initial_velocity, using the learned forcing term as
// is. The step is shrunk, if needed, so that the grid ends exactly at horizon.
// Returns states only.
Trajectory Rollout(const Dmp& dmp, const Vector& goal, double dt, double horizon);

// |exp(-D t / (2 tau)) (-D t / (2 tau) - 1) + 1| * goal_distance: the distance
// between rollouts of the same critically damped DMP to goals that are
// goal_distance apart.
double Deviation(const DmpParams& params, double t, double goal_distance);

}  // namespace optmotion

#endif  // OPTMOTION_DMP_H_
