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
#include <deque>
#include <limits>

#include "optmotion/errors.h"
#include "optmotion/nlp.h"

namespace optmotion {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kCurvature = 0.9;

struct LinePoint {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;
  Vector x;
  Vector gradient;
};

// minimizer of the cubic through (a, fa, da), (b, fb, db), safeguarded into
// the interval between a and b
double CubicStep(const LinePoint& a, const LinePoint& b) {
  const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.step - b.step);
  const double radicand = d1 * d1 - a.slope * b.slope;
  const double lo = std::min(a.step, b.step);
  const double hi = std::max(a.step, b.step);
  if (radicand >= 0.0 && std::isfinite(radicand)) {
    const double d2 = std::copysign(std::sqrt(radicand), b.step - a.step);
    const double step =
        b.step - (b.step - a.step) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
    const double margin = 0.1 * (hi - lo);
    if (std::isfinite(step) && step > lo + margin && step < hi - margin) return step;
  }
  return 0.5 * (lo + hi);
}

class WolfeSearch {
 public:
  WolfeSearch(const ValueAndGradient& fg, const Vector& x, const Vector& direction)
      : fg_(fg), x_(x), direction_(direction) {}

  LinePoint Evaluate(double step) {
    LinePoint point;
    point.step = step;
    point.x = x_ + step * direction_;
    point.gradient.resize(x_.size());
    point.value = fg_(point.x, &point.gradient);
    if (!std::isfinite(point.value) || !point.gradient.allFinite()) {
      point.value = std::numeric_limits<double>::infinity();
      point.slope = std::numeric_limits<double>::quiet_NaN();
    } else {
      point.slope = point.gradient.dot(direction_);
    }
    ++evaluations_;
    return point;
  }

  // Returns false when no acceptable step was found.
  bool Search(const LinePoint& origin, double initial_step, LinePoint* accepted) {
    LinePoint previous = origin;
    double step = initial_step;
    for (int iter = 0; iter < 40; ++iter) {
      LinePoint trial = Evaluate(step);
      if (!std::isfinite(trial.value)) {
        step = 0.5 * (previous.step + step);
        if (step - previous.step < 1e-16) return false;
        continue;
      }
      if (trial.value > origin.value + kArmijo * step * origin.slope ||
          (iter > 0 && trial.value >= previous.value)) {
        return Zoom(origin, previous, trial, accepted);
      }
      if (std::abs(trial.slope) <= -kCurvature * origin.slope) {
        *accepted = std::move(trial);
        return true;
      }
      if (trial.slope >= 0.0) return Zoom(origin, trial, previous, accepted);
      previous = std::move(trial);
      step *= 2.0;
    }
    return false;
  }

  int evaluations() const { return evaluations_; }

 private:
  bool Zoom(const LinePoint& origin, LinePoint lo, LinePoint hi, LinePoint* accepted) {
    for (int iter = 0; iter < 30; ++iter) {
      double step;
      if (std::isfinite(hi.value) && std::isfinite(hi.slope)) {
        step = CubicStep(lo, hi);
      } else {
        step = 0.5 * (lo.step + hi.step);
      }
      LinePoint trial = Evaluate(step);
      if (!std::isfinite(trial.value) ||
          trial.value > origin.value + kArmijo * step * origin.slope ||
          trial.value >= lo.value) {
        hi = std::move(trial);
      } else {
        if (std::abs(trial.slope) <= -kCurvature * origin.slope) {
          *accepted = std::move(trial);
          return true;
        }
        if (trial.slope * (hi.step - lo.step) >= 0.0) hi = lo;
        lo = std::move(trial);
      }
      if (std::abs(hi.step - lo.step) <= 1e-14 * std::max(1.0, lo.step)) break;
    }
    // accept a sufficient-decrease point even without the curvature condition
    if (lo.step > 0.0 && lo.value < origin.value) {
      *accepted = std::move(lo);
      return true;
    }
    return false;
  }

  const ValueAndGradient& fg_;
  const Vector& x_;
  const Vector& direction_;
  int evaluations_ = 0;
};

}  // namespace

LbfgsResult MinimizeLbfgs(const ValueAndGradient& value_and_gradient, Vector x0,
                          const LbfgsOptions& options) {
  LbfgsResult result;
  result.x = std::move(x0);
  result.gradient.resize(result.x.size());
  result.value = value_and_gradient(result.x, &result.gradient);
  if (!std::isfinite(result.value) || !result.gradient.allFinite()) {
    throw NumericalError("objective is not finite at the starting point");
  }

  std::deque<Vector> s_history;
  std::deque<Vector> y_history;
  std::deque<double> rho_history;
  std::vector<double> alpha(options.memory);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (result.gradient.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
      result.converged = true;
      return result;
    }

    // two-loop recursion
    Vector direction = -result.gradient;
    const int stored = static_cast<int>(s_history.size());
    for (int i = stored - 1; i >= 0; --i) {
      alpha[i] = rho_history[i] * s_history[i].dot(direction);
      direction -= alpha[i] * y_history[i];
    }
    if (stored > 0) {
      direction *= s_history.back().dot(y_history.back()) /
                   y_history.back().squaredNorm();
    }
    for (int i = 0; i < stored; ++i) {
      const double beta = rho_history[i] * y_history[i].dot(direction);
      direction += (alpha[i] - beta) * s_history[i];
    }

    LinePoint origin;
    origin.value = result.value;
    origin.slope = result.gradient.dot(direction);
    if (!(origin.slope < 0.0)) {
      // not a descent direction: restart from steepest descent
      s_history.clear();
      y_history.clear();
      rho_history.clear();
      direction = -result.gradient;
      origin.slope = -result.gradient.squaredNorm();
    }
    double initial_step = 1.0;
    if (s_history.empty()) {
      initial_step = std::min(1.0, 1.0 / std::max(1e-300, direction.lpNorm<Eigen::Infinity>()));
    }

    WolfeSearch search(value_and_gradient, result.x, direction);
    LinePoint accepted;
    if (!search.Search(origin, initial_step, &accepted)) {
      if (s_history.empty()) break;
      s_history.clear();
      y_history.clear();
      rho_history.clear();
      continue;
    }

    Vector s = accepted.x - result.x;
    Vector y = accepted.gradient - result.gradient;
    const double sy = s.dot(y);
    result.x = std::move(accepted.x);
    result.gradient = std::move(accepted.gradient);
    result.value = accepted.value;
    result.iterations = iter + 1;

    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (static_cast<int>(s_history.size()) == options.memory) {
        s_history.pop_front();
        y_history.pop_front();
        rho_history.pop_front();
      }
      s_history.push_back(std::move(s));
      y_history.push_back(std::move(y));
      rho_history.push_back(1.0 / sy);
    }
  }
  result.converged =
      result.gradient.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance;
  return result;
}

}  // namespace optmotion
