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

#ifndef OPTMOTION_VALUE_ESTIMATION_H_
#define OPTMOTION_VALUE_ESTIMATION_H_

#include <iosfwd>
#include <string>

#include "optmotion/dynamics.h"
#include "optmotion/trajectory.h"

namespace optmotion {

// Optimal cost and its gradient with respect to the terminal state, at a
// terminal state where the problem was solved exactly.
struct ValueAnchor {
  Vector xf;
  double cost = 0.0;
  Vector gradient;
};

struct SuboptimalityReport {
  Vector query;
  double dmp_cost = 0.0;
  double estimated_optimal_cost = 0.0;
  double gap = 0.0;  // dmp_cost - estimated_optimal_cost
  double goal_distance = 0.0;
};

// u_k = g^-1(x_k) (xdot_k - f(x_k)) with xdot from finite differences on the
// uniform grid. Returns a copy with inputs filled and cost recomputed.
// Throws CapabilityError when the system has no actuation inverse.
Trajectory RecoverInput(const Trajectory& trajectory, const SystemDynamics& dynamics,
                        const RunningCost& cost);

// Which backward-solution input stands in for v*(xf, 0).
enum class InitialInputRule {
  kInitialNode,             // v at node 0 (free when the pin sits at the final node)
  kQuadraticExtrapolation,  // 3 v_1 - 3 v_2 + v_3
  kFirstInteriorNode,       // v_1
};

Vector InitialInput(const Trajectory& backward_trajectory, InitialInputRule rule);

// dV/dx at the anchor: 2 g(xf)^-T R v*(xf, 0), from a converged solution of
// the backward problem starting at z(0) = xf. Throws SolverStateError for a
// non-converged trajectory.
Vector ValueGradientAtAnchor(const Trajectory& backward_trajectory,
                             const SystemDynamics& dynamics, const Matrix& R,
                             InitialInputRule rule = InitialInputRule::kQuadraticExtrapolation);

// anchor.cost + anchor.gradient . (query - anchor.xf)
double FirstOrderEstimate(const ValueAnchor& anchor, const Vector& query);

// Compares the quadrature cost of a generalized trajectory with inputs
// against the first-order estimate of the optimal cost at query.
SuboptimalityReport Suboptimality(const Trajectory& trajectory_with_inputs,
                                  const RunningCost& cost, const ValueAnchor& anchor,
                                  const Vector& query);

// Header xq_1..xq_n,dmp_cost,estimate,gap,distance.
std::string SuboptimalityCsvHeader(int state_dim);
void WriteSuboptimalityCsvRow(const SuboptimalityReport& report, std::ostream& out);

}  // namespace optmotion

#endif  // OPTMOTION_VALUE_ESTIMATION_H_
