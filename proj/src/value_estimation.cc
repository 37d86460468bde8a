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

#include "optmotion/value_estimation.h"

#include <ostream>
#include <vector>

#include "optmotion/errors.h"

namespace optmotion {

Trajectory RecoverInput(const Trajectory& trajectory, const SystemDynamics& dynamics,
                        const RunningCost& cost) {
  if (trajectory.size() < 3) {
    throw ContractError("input recovery needs at least three samples");
  }
  if (!dynamics.has_inverse()) {
    throw CapabilityError("input recovery needs the actuation inverse of '" +
                          dynamics.name + "'");
  }
  const double step = UniformStep(trajectory.times);
  const std::vector<Vector> velocity = DifferentiateSamples(trajectory.states, step);
  Trajectory recovered = trajectory;
  recovered.inputs.resize(trajectory.size());
  for (int k = 0; k < trajectory.size(); ++k) {
    const Vector& x = trajectory.states[k];
    recovered.inputs[k] =
        EvalActuationInverse(dynamics, x) * (velocity[k] - EvalDrift(dynamics, x));
  }
  recovered.cost = TrajectoryCost(recovered, cost);
  return recovered;
}

Vector InitialInput(const Trajectory& backward_trajectory, InitialInputRule rule) {
  const auto& inputs = backward_trajectory.inputs;
  switch (rule) {
    case InitialInputRule::kInitialNode:
      if (inputs.empty()) break;
      return inputs[0];
    case InitialInputRule::kQuadraticExtrapolation:
      if (inputs.size() < 4) break;
      return 3.0 * inputs[1] - 3.0 * inputs[2] + inputs[3];
    case InitialInputRule::kFirstInteriorNode:
      if (inputs.size() < 2) break;
      return inputs[1];
  }
  throw ContractError("backward trajectory has too few inputs for the initial-input rule");
}

Vector ValueGradientAtAnchor(const Trajectory& backward_trajectory,
                             const SystemDynamics& dynamics, const Matrix& R,
                             InitialInputRule rule) {
  if (!backward_trajectory.converged) {
    throw SolverStateError("value gradient needs a converged backward solution");
  }
  if (backward_trajectory.size() == 0) throw ContractError("empty backward trajectory");
  const Vector& xf = backward_trajectory.states.front();
  const Matrix inverse = EvalActuationInverse(dynamics, xf);
  return 2.0 * inverse.transpose() * (R * InitialInput(backward_trajectory, rule));
}

double FirstOrderEstimate(const ValueAnchor& anchor, const Vector& query) {
  if (query.size() != anchor.xf.size() || anchor.gradient.size() != anchor.xf.size()) {
    throw ContractError("query and anchor dimensions differ");
  }
  return anchor.cost + anchor.gradient.dot(query - anchor.xf);
}

SuboptimalityReport Suboptimality(const Trajectory& trajectory_with_inputs,
                                  const RunningCost& cost, const ValueAnchor& anchor,
                                  const Vector& query) {
  if (trajectory_with_inputs.size() < 2) {
    throw ContractError("suboptimality needs a trajectory with at least two samples");
  }
  SuboptimalityReport report;
  report.query = query;
  report.dmp_cost = TrajectoryCost(trajectory_with_inputs, cost);
  report.estimated_optimal_cost = FirstOrderEstimate(anchor, query);
  report.gap = report.dmp_cost - report.estimated_optimal_cost;
  report.goal_distance = (query - anchor.xf).norm();
  return report;
}

std::string SuboptimalityCsvHeader(int state_dim) {
  std::string header;
  for (int i = 1; i <= state_dim; ++i) header += "xq_" + std::to_string(i) + ",";
  return header + "dmp_cost,estimate,gap,distance";
}

void WriteSuboptimalityCsvRow(const SuboptimalityReport& report, std::ostream& out) {
  for (int i = 0; i < report.query.size(); ++i) out << FormatDouble(report.query(i)) << ",";
  out << FormatDouble(report.dmp_cost) << "," << FormatDouble(report.estimated_optimal_cost)
      << "," << FormatDouble(report.gap) << "," << FormatDouble(report.goal_distance) << "\n";
}

}  // namespace optmotion
