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

#ifndef OPTMOTION_DYNAMICS_H_
#define OPTMOTION_DYNAMICS_H_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace optmotion {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Control-affine system  xdot = f(x) + g(x) u  with n states and m inputs.
//
// All members are pure functions of their arguments. The actuation inverse is
// optional; input recovery and value-gradient recovery require it. The state
// Jacobian of f(x) + g(x) u is optional as well and is replaced by central
// finite differences when absent.
struct SystemDynamics {
  std::string name;
  int state_dim = 0;
  int input_dim = 0;
  std::function<Vector(const Vector&)> drift;
  std::function<Matrix(const Vector&)> actuation;
  std::function<Matrix(const Vector&)> actuation_inverse;
  std::function<Matrix(const Vector&, const Vector&)> state_jacobian;

  bool has_inverse() const { return static_cast<bool>(actuation_inverse); }
};

// maximum elementwise deviation of g(x) g^-1(x) from the identity
inline constexpr double kInverseCheckTolerance = 1e-10;

Vector EvalDrift(const SystemDynamics& dynamics, const Vector& x);
Matrix EvalActuation(const SystemDynamics& dynamics, const Vector& x);

// Returns g^-1(x). Throws CapabilityError when the system has no inverse and
// NumericalError when g(x) g^-1(x) is not the identity to kInverseCheckTolerance.
Matrix EvalActuationInverse(const SystemDynamics& dynamics, const Vector& x);

// f(x) + g(x) u
Vector EvalVectorField(const SystemDynamics& dynamics, const Vector& x,
                       const Vector& u);

// d/dx (f(x) + g(x) u), n x n
Matrix EvalStateJacobian(const SystemDynamics& dynamics, const Vector& x,
                         const Vector& u);

// xdot = (-x1^2, -2 x2) + [[1, x1], [0, 1]] u
SystemDynamics ExampleSystem();

// xdot = u, n = m = 1
SystemDynamics ScalarIntegrator();

// Built-in systems by name ("example_sys1", "scalar_integrator").
// Throws ContractError for unknown names.
SystemDynamics MakeDynamics(std::string_view name);
std::vector<std::string> RegisteredDynamics();

}  // namespace optmotion

#endif  // OPTMOTION_DYNAMICS_H_
