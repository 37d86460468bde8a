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

#include "optmotion/trajectory.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "optmotion/errors.h"

namespace optmotion {

double RunningCost::Evaluate(const Vector& x, const Vector& u) const {
  double value = u.dot(R * u);
  if (state_cost) value += state_cost(x);
  return value;
}

RunningCost InputEnergyCost(const Matrix& R) {
  ValidateInputWeight(R);
  RunningCost cost;
  cost.R = R;
  return cost;
}

RunningCost QuadraticStateCost(const Matrix& R, double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw ContractError("state weight must be positive");
  RunningCost cost = InputEnergyCost(R);
  cost.state_cost = [q](const Vector& x) { return q * x.squaredNorm(); };
  cost.state_cost_gradient = [q](const Vector& x) { return Vector(2.0 * q * x); };
  return cost;
}

void ValidateInputWeight(const Matrix& R) {
  if (R.rows() == 0 || R.rows() != R.cols()) {
    throw ContractError("input weight R must be a non-empty square matrix");
  }
  if (!R.isApprox(R.transpose(), 1e-12)) {
    throw ContractError("input weight R must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eigen(R, Eigen::EigenvaluesOnly);
  if (!(eigen.eigenvalues().minCoeff() > 0.0)) {
    throw ContractError("input weight R must be positive definite");
  }
}

double TrajectoryCost(const Trajectory& trajectory, const RunningCost& cost) {
  if (trajectory.size() < 2) {
    throw ContractError("cost quadrature needs at least two samples");
  }
  if (static_cast<int>(trajectory.inputs.size()) != trajectory.size()) {
    throw ContractError("cost quadrature needs one input per sample");
  }
  double total = 0.0;
  double previous = cost.Evaluate(trajectory.states[0], trajectory.inputs[0]);
  for (int k = 1; k < trajectory.size(); ++k) {
    const double current = cost.Evaluate(trajectory.states[k], trajectory.inputs[k]);
    total += 0.5 * (trajectory.times[k] - trajectory.times[k - 1]) * (previous + current);
    previous = current;
  }
  return total;
}

double MaxStateDifference(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) {
    throw ContractError("trajectories have different sample counts");
  }
  double worst = 0.0;
  for (int k = 0; k < a.size(); ++k) {
    worst = std::max(worst, (a.states[k] - b.states[k]).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<Vector> DifferentiateSamples(const std::vector<Vector>& samples,
                                         double step) {
  const int count = static_cast<int>(samples.size());
  if (count < 3) throw ContractError("differentiation needs at least three samples");
  std::vector<Vector> derivative(count);
  for (int k = 1; k + 1 < count; ++k) {
    derivative[k] = (samples[k + 1] - samples[k - 1]) / (2.0 * step);
  }
  derivative[0] = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * step);
  derivative[count - 1] = (3.0 * samples[count - 1] - 4.0 * samples[count - 2] +
                           samples[count - 3]) /
                          (2.0 * step);
  return derivative;
}

std::vector<Vector> SecondDifferenceSamples(const std::vector<Vector>& samples,
                                            double step) {
  const int count = static_cast<int>(samples.size());
  if (count < 4) {
    throw ContractError("second differences need at least four samples");
  }
  const double h2 = step * step;
  std::vector<Vector> second(count);
  for (int k = 1; k + 1 < count; ++k) {
    second[k] = (samples[k + 1] - 2.0 * samples[k] + samples[k - 1]) / h2;
  }
  second[0] = (2.0 * samples[0] - 5.0 * samples[1] + 4.0 * samples[2] - samples[3]) / h2;
  second[count - 1] = (2.0 * samples[count - 1] - 5.0 * samples[count - 2] +
                       4.0 * samples[count - 3] - samples[count - 4]) /
                      h2;
  return second;
}

double UniformStep(const std::vector<double>& times) {
  if (times.size() < 2) throw ContractError("time grid needs at least two samples");
  const double step = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(step > 0.0)) throw ContractError("time grid must be strictly increasing");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs((times[k] - times[k - 1]) - step) > 1e-9 * std::max(1.0, step)) {
      throw ContractError("time grid is not uniform");
    }
  }
  return step;
}

std::string FormatDouble(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw NumericalError("cannot format double");
  return std::string(buffer, end);
}

double ParseDouble(std::string_view token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("malformed number '" + std::string(token) + "'");
  }
  return value;
}

void WriteTrajectoryCsv(const Trajectory& trajectory, std::ostream& out) {
  const int n = trajectory.state_dim();
  const int m = trajectory.input_dim();
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  for (int i = 1; i <= m; ++i) out << ",u" << i;
  out << "\n";
  for (int k = 0; k < trajectory.size(); ++k) {
    out << FormatDouble(trajectory.times[k]);
    for (int i = 0; i < n; ++i) out << "," << FormatDouble(trajectory.states[k](i));
    for (int i = 0; i < m; ++i) out << "," << FormatDouble(trajectory.inputs[k](i));
    out << "\n";
  }
}

void WriteTrajectoryCsv(const Trajectory& trajectory, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  WriteTrajectoryCsv(trajectory, out);
}

Trajectory ReadTrajectoryCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trajectory CSV");
  int n = 0;
  int m = 0;
  {
    std::stringstream header(line);
    std::string column;
    std::getline(header, column, ',');
    if (column != "t") throw ParseError("trajectory CSV must start with column 't'");
    while (std::getline(header, column, ',')) {
      if (!column.empty() && column[0] == 'x' && m == 0) {
        ++n;
      } else if (!column.empty() && column[0] == 'u') {
        ++m;
      } else {
        throw ParseError("unexpected trajectory CSV column '" + column + "'");
      }
    }
  }
  Trajectory trajectory;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> values;
    const char* cursor = line.data();
    const char* end = line.data() + line.size();
    while (cursor <= end) {
      const char* comma = std::find(cursor, end, ',');
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(cursor, comma, value);
      if (ec != std::errc() || ptr != comma) {
        throw ParseError("malformed number in trajectory CSV row '" + line + "'");
      }
      values.push_back(value);
      cursor = comma + 1;
    }
    if (static_cast<int>(values.size()) != 1 + n + m) {
      throw ParseError("trajectory CSV row has the wrong number of columns");
    }
    trajectory.times.push_back(values[0]);
    trajectory.states.push_back(Eigen::Map<Vector>(values.data() + 1, n));
    if (m > 0) trajectory.inputs.push_back(Eigen::Map<Vector>(values.data() + 1 + n, m));
  }
  return trajectory;
}

}  // namespace optmotion
