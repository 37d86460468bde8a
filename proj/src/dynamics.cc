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

#include "optmotion/dynamics.h"

#include <cmath>
#include <string>

#include "optmotion/errors.h"

namespace optmotion {
namespace {

void CheckState(const SystemDynamics& dynamics, const Vector& x) {
  if (x.size() != dynamics.state_dim) {
    throw ContractError("state has dimension " + std::to_string(x.size()) +
                        ", system '" + dynamics.name + "' expects " +
                        std::to_string(dynamics.state_dim));
  }
}

void CheckInput(const SystemDynamics& dynamics, const Vector& u) {
  if (u.size() != dynamics.input_dim) {
    throw ContractError("input has dimension " + std::to_string(u.size()) +
                        ", system '" + dynamics.name + "' expects " +
                        std::to_string(dynamics.input_dim));
  }
}

}  // namespace

Vector EvalDrift(const SystemDynamics& dynamics, const Vector& x) {
  CheckState(dynamics, x);
  return dynamics.drift(x);
}

Matrix EvalActuation(const SystemDynamics& dynamics, const Vector& x) {
  CheckState(dynamics, x);
  return dynamics.actuation(x);
}

Matrix EvalActuationInverse(const SystemDynamics& dynamics, const Vector& x) {
  CheckState(dynamics, x);
  if (!dynamics.has_inverse()) {
    throw CapabilityError("system '" + dynamics.name +
                          "' has no actuation inverse");
  }
  Matrix inverse = dynamics.actuation_inverse(x);
  Matrix g = dynamics.actuation(x);
  Matrix product = dynamics.state_dim == dynamics.input_dim ? Matrix(g * inverse)
                                                            : Matrix(inverse * g);
  const double deviation =
      (product - Matrix::Identity(product.rows(), product.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (!(deviation < kInverseCheckTolerance)) {
    throw NumericalError("actuation inverse check failed for system '" +
                         dynamics.name + "' (deviation " +
                         std::to_string(deviation) + ")");
  }
  return inverse;
}

Vector EvalVectorField(const SystemDynamics& dynamics, const Vector& x,
                       const Vector& u) {
  CheckState(dynamics, x);
  CheckInput(dynamics, u);
  return dynamics.drift(x) + dynamics.actuation(x) * u;
}

Matrix EvalStateJacobian(const SystemDynamics& dynamics, const Vector& x,
                         const Vector& u) {
  CheckState(dynamics, x);
  CheckInput(dynamics, u);
  if (dynamics.state_jacobian) return dynamics.state_jacobian(x, u);

  const int n = dynamics.state_dim;
  Matrix jacobian(n, n);
  Vector perturbed = x;
  for (int j = 0; j < n; ++j) {
    const double step = 1e-6 * std::max(1.0, std::abs(x(j)));
    perturbed(j) = x(j) + step;
    const Vector plus = dynamics.drift(perturbed) + dynamics.actuation(perturbed) * u;
    perturbed(j) = x(j) - step;
    const Vector minus = dynamics.drift(perturbed) + dynamics.actuation(perturbed) * u;
    perturbed(j) = x(j);
    jacobian.col(j) = (plus - minus) / (2.0 * step);
  }
  return jacobian;
}

SystemDynamics ExampleSystem() {
  SystemDynamics dynamics;
  dynamics.name = "example_sys1";
  dynamics.state_dim = 2;
  dynamics.input_dim = 2;
  dynamics.drift = [](const Vector& x) {
    Vector f(2);
    f << -x(0) * x(0), -2.0 * x(1);
    return f;
  };
  dynamics.actuation = [](const Vector& x) {
    Matrix g(2, 2);
    g << 1.0, x(0), 0.0, 1.0;
    return g;
  };
  dynamics.actuation_inverse = [](const Vector& x) {
    Matrix inverse(2, 2);
    inverse << 1.0, -x(0), 0.0, 1.0;
    return inverse;
  };
  dynamics.state_jacobian = [](const Vector& x, const Vector& u) {
    Matrix jacobian(2, 2);
    jacobian << -2.0 * x(0) + u(1), 0.0, 0.0, -2.0;
    return jacobian;
  };
  return dynamics;
}

SystemDynamics ScalarIntegrator() {
  SystemDynamics dynamics;
  dynamics.name = "scalar_integrator";
  dynamics.state_dim = 1;
  dynamics.input_dim = 1;
  dynamics.drift = [](const Vector&) { return Vector::Zero(1).eval(); };
  dynamics.actuation = [](const Vector&) { return Matrix::Identity(1, 1).eval(); };
  dynamics.actuation_inverse = [](const Vector&) {
    return Matrix::Identity(1, 1).eval();
  };
  dynamics.state_jacobian = [](const Vector&, const Vector&) {
    return Matrix::Zero(1, 1).eval();
  };
  return dynamics;
}

SystemDynamics MakeDynamics(std::string_view name) {
  if (name == "example_sys1") return ExampleSystem();
  if (name == "scalar_integrator") return ScalarIntegrator();
  throw ContractError("unknown system '" + std::string(name) + "'");
}

std::vector<std::string> RegisteredDynamics() {
  return {"example_sys1", "scalar_integrator"};
}

}  // namespace optmotion
