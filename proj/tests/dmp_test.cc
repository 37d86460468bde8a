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
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "optmotion/errors.h"
#include "optmotion/io.h"
#include "test_util.h"

namespace optmotion {
namespace {

using testing::Vec;

// Smooth rest-to-rest demonstration sampled on [0, tau].
Trajectory Demonstration(const Vector& x0, const Vector& xf, double tau, int samples) {
  Trajectory demo;
  for (int k = 0; k < samples; ++k) {
    const double t = tau * k / (samples - 1.0);
    const double r = t / tau;
    const double blend = r * r * r * (10.0 - 15.0 * r + 6.0 * r * r);
    demo.times.push_back(t);
    demo.states.push_back(x0 + blend * (xf - x0));
  }
  return demo;
}

Dmp RandomDmp(std::mt19937& rng, int n, int basis_count) {
  Dmp dmp;
  dmp.params = CriticallyDampedParams(2.0, 20.0, 3.0, basis_count);
  dmp.basis = MakeBasis(dmp.params.alpha, basis_count);
  dmp.weights = Matrix::Zero(n, basis_count);
  for (int i = 0; i < n; ++i) {
    dmp.weights.row(i) = testing::UniformVector(rng, basis_count, -200.0, 200.0).transpose();
  }
  dmp.x0 = testing::UniformVector(rng, n, -5.0, 5.0);
  dmp.initial_velocity = testing::UniformVector(rng, n, -1.0, 1.0);
  dmp.xf_anchor = dmp.x0;
  dmp.anchor_value_gradient = Vector::Zero(n);
  dmp.fit_residual_max = Vector::Zero(n);
  return dmp;
}

TEST(BasisTest, CentersAndWidths) {
  const BasisSet basis = MakeBasis(3.0, 5);
  ASSERT_EQ(basis.size(), 5);
  for (int j = 0; j < 5; ++j) EXPECT_DOUBLE_EQ(basis.centers[j], std::exp(-3.0 * j / 4.0));
  for (int j = 0; j < 4; ++j) {
    const double gap = basis.centers[j + 1] - basis.centers[j];
    EXPECT_DOUBLE_EQ(basis.widths[j], 1.0 / (gap * gap));
  }
  EXPECT_EQ(basis.widths[4], basis.widths[3]);
  EXPECT_THROW(MakeBasis(3.0, 1), ContractError);
}

TEST(BasisTest, ForcingMatchesDirectSummation) {
  std::mt19937 rng(2);
  const Dmp dmp = RandomDmp(rng, 3, 15);
  for (double s : {1.0, 0.7, 0.31, 0.05, 1e-4}) {
    const Vector forcing = Forcing(dmp, s);
    for (int i = 0; i < 3; ++i) {
      double numerator = 0.0;
      double denominator = 0.0;
      for (int j = 0; j < dmp.basis.size(); ++j) {
        const double psi = std::exp(-dmp.basis.widths[j] * std::pow(s - dmp.basis.centers[j], 2));
        numerator += psi * dmp.weights(i, j);
        denominator += psi;
      }
      EXPECT_NEAR(forcing(i), s * numerator / denominator, 1e-12 * (1 + std::abs(forcing(i))));
    }
  }
}

TEST(ClockTest, DecaysExponentially) {
  const DmpParams params = CriticallyDampedParams(8.0);
  EXPECT_EQ(Clock(0.0, params), 1.0);
  EXPECT_NEAR(Clock(8.0, params), std::exp(-3.0), 1e-15);
  EXPECT_THROW(Clock(-1.0, params), ContractError);
}

TEST(ParamsTest, RejectsInvalidParameters) {
  EXPECT_THROW(CriticallyDampedParams(0.0), ContractError);
  EXPECT_THROW(CriticallyDampedParams(1.0, -1.0), ContractError);
  EXPECT_THROW(CriticallyDampedParams(1.0, 20.0, 3.0, 1), ContractError);
  DmpParams params = CriticallyDampedParams(1.0);
  params.stiffness = 50.0;
  EXPECT_THROW(ValidateParams(params), ContractError);
}

TEST(DeviationTest, ClosedForm) {
  const DmpParams params = CriticallyDampedParams(8.0, 20.0);
  // r = D t / (2 tau) = 1 at t = 0.8
  EXPECT_NEAR(Deviation(params, 0.8, 2.0), 2.0 * (1.0 - 2.0 / std::exp(1.0)), 1e-15);
  EXPECT_NEAR(Deviation(params, 0.8, 1.0), 0.26424, 1e-5);
  EXPECT_EQ(Deviation(params, 0.0, 3.0), 0.0);
  EXPECT_NEAR(Deviation(params, 100.0, 3.0), 3.0, 1e-12);
}

// Rollouts of one DMP towards two goals differ by exactly the closed-form
// deviation in every dimension, whatever the weights and initial velocity.
TEST(DeviationTest, GoalShiftPropertyOnRandomDmps) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const Dmp dmp = RandomDmp(rng, n, 10);
    const Vector goal = testing::UniformVector(rng, n, -5.0, 5.0);
    const Vector shift = testing::UniformVector(rng, n, -3.0, 3.0);
    const Trajectory a = Rollout(dmp, goal, 0.002, 3.0 * dmp.params.tau);
    const Trajectory b = Rollout(dmp, goal + shift, 0.002, 3.0 * dmp.params.tau);
    for (int k = 0; k < a.size(); k += 50) {
      for (int i = 0; i < n; ++i) {
        const double expected = Deviation(dmp.params, a.times[k], std::abs(shift(i)));
        EXPECT_NEAR(std::abs(b.states[k](i) - a.states[k](i)), expected, 1e-8)
            << "trial " << trial << " t " << a.times[k];
      }
    }
  }
}

TEST(LearnTest, TooFewSamplesIsIllPosed) {
  const Trajectory demo = Demonstration(Vec({0.0}), Vec({1.0}), 1.0, 10);
  EXPECT_THROW(LearnWeights(demo, CriticallyDampedParams(1.0, 20.0, 3.0, 15)), IllPosedError);
  EXPECT_NO_THROW(LearnWeights(demo, CriticallyDampedParams(1.0, 20.0, 3.0, 10)));
}

TEST(LearnTest, ReproducesSmoothDemonstration) {
  const Vector x0 = Vec({1.0, -2.0});
  const Vector xf = Vec({4.0, 3.0});
  const Trajectory demo = Demonstration(x0, xf, 2.0, 201);
  const Dmp dmp = LearnWeights(demo, CriticallyDampedParams(2.0, 20.0, 3.0, 30));
  EXPECT_EQ(dmp.x0, x0);
  EXPECT_EQ(dmp.xf_anchor, xf);
  EXPECT_GE(dmp.fit_residual_max.maxCoeff(), dmp.fit_residual);
  const Trajectory rollout = Rollout(dmp, xf, 0.01, 2.0);
  ASSERT_EQ(rollout.size(), demo.size());
  EXPECT_LT(MaxStateDifference(rollout, demo), 1e-2 * (xf - x0).norm());
}

TEST(LearnTest, SettlesAtTheGoal) {
  const Vector xf = Vec({4.0, 3.0});
  const Trajectory demo = Demonstration(Vec({1.0, -2.0}), xf, 2.0, 201);
  const Dmp dmp = LearnWeights(demo, CriticallyDampedParams(2.0, 20.0, 3.0, 30));
  for (const Vector& goal : {xf, Vec({6.0, 0.0})}) {
    const Trajectory rollout = Rollout(dmp, goal, 0.01, 3.0 * 2.0);
    EXPECT_LT((rollout.states.back() - goal).norm(), 1e-2);
  }
}

TEST(LearnTest, StartAtRestZeroesInitialVelocity) {
  const Trajectory demo = Demonstration(Vec({0.0}), Vec({1.0}), 1.0, 50);
  DmpParams params = CriticallyDampedParams(1.0);
  params.start_at_rest = true;
  EXPECT_EQ(LearnWeights(demo, params).initial_velocity.norm(), 0.0);
}

TEST(LearnTest, NonFiniteInputsAreNumericalErrors) {
  Trajectory demo = Demonstration(Vec({0.0}), Vec({1.0}), 1.0, 50);
  demo.states[20](0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(LearnWeights(demo, CriticallyDampedParams(1.0)), NumericalError);

  std::mt19937 rng(1);
  Dmp dmp = RandomDmp(rng, 1, 5);
  dmp.weights(0, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Rollout(dmp, Vec({1.0}), 0.01, 1.0), NumericalError);
}

TEST(DmpIoTest, RoundTripIsExact) {
  std::mt19937 rng(8);
  Dmp dmp = RandomDmp(rng, 2, 7);
  dmp.xf_anchor = Vec({1.0 / 3.0, -2.5});
  dmp.anchor_cost = 100.84751262382282;
  dmp.anchor_value_gradient = Vec({1e-7, 40.5});
  dmp.fit_residual = 0.125;
  dmp.fit_residual_max = Vec({0.5, 0.25});
  std::stringstream buffer;
  WriteDmp(dmp, buffer);
  const Dmp read = ReadDmp(buffer);
  EXPECT_EQ(read.weights, dmp.weights);
  EXPECT_EQ(read.x0, dmp.x0);
  EXPECT_EQ(read.initial_velocity, dmp.initial_velocity);
  EXPECT_EQ(read.xf_anchor, dmp.xf_anchor);
  EXPECT_EQ(read.anchor_cost, dmp.anchor_cost);
  EXPECT_EQ(read.anchor_value_gradient, dmp.anchor_value_gradient);
  EXPECT_EQ(read.fit_residual_max, dmp.fit_residual_max);
  EXPECT_EQ(read.params.tau, dmp.params.tau);
  EXPECT_EQ(read.basis.centers, dmp.basis.centers);
  EXPECT_EQ(read.basis.widths, dmp.basis.widths);
}

TEST(DmpIoTest, MalformedFilesAreParseErrors) {
  std::mt19937 rng(8);
  std::stringstream buffer;
  WriteDmp(RandomDmp(rng, 2, 4), buffer);
  const std::string text = buffer.str();

  std::stringstream wrong_version("optmotion-dmp 2\n" + text.substr(text.find('\n') + 1));
  EXPECT_THROW(ReadDmp(wrong_version), ParseError);
  std::stringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_THROW(ReadDmp(truncated), ParseError);
  const size_t second_line = text.find('\n') + 1;
  const std::string first_key = text.substr(second_line, text.find('\n', second_line) + 1 -
                                                             second_line);
  std::stringstream duplicated(text.substr(0, second_line) + first_key +
                               text.substr(second_line));
  EXPECT_THROW(ReadDmp(duplicated), ParseError);
  std::stringstream empty("");
  EXPECT_THROW(ReadDmp(empty), ParseError);
}

}  // namespace
}  // namespace optmotion
