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


#include "optmotion/sampler.h"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>

#include <gtest/gtest.h>

#include "optmotion/errors.h"
#include "optmotion/io.h"
#include "test_util.h"

namespace optmotion {
namespace {

using testing::Vec;

SamplerConfig LineConfig(double lower, double upper, double start = 0.0) {
  SamplerConfig config;
  config.start = Vec({start});
  config.direction = Vec({1.0});
  config.region = Box{Vec({lower}), Vec({upper})};
  config.delta_x = 0.1;
  config.t_samples = 50;
  return config;
}

// x' = u in the plane
SystemDynamics PlanarIntegrator(std::shared_ptr<std::atomic<int>> drift_calls = nullptr) {
  SystemDynamics dynamics;
  dynamics.name = "planar_integrator";
  dynamics.state_dim = 2;
  dynamics.input_dim = 2;
  dynamics.drift = [drift_calls](const Vector& x) {
    if (drift_calls) ++*drift_calls;
    return Vector::Zero(x.size()).eval();
  };
  dynamics.actuation = [](const Vector&) { return Matrix::Identity(2, 2).eval(); };
  dynamics.actuation_inverse = [](const Vector&) { return Matrix::Identity(2, 2).eval(); };
  return dynamics;
}

AnchorSettings PlanarSettings(std::shared_ptr<std::atomic<int>> drift_calls = nullptr) {
  AnchorSettings settings = testing::IntegratorSettings();
  settings.dynamics = PlanarIntegrator(std::move(drift_calls));
  settings.x0 = Vec({0.0, 0.0});
  settings.cost = InputEnergyCost(Matrix::Identity(2, 2));
  settings.n_intervals = 20;
  return settings;
}

std::vector<double> AnchorCoordinates(const DirectionResult& result) {
  return result.grid.coordinates.front();
}

TEST(AnchorTest, IntegratorAnchorCarriesValueAndGradient) {
  const AnchorBuild build = BuildAnchor(testing::IntegratorSettings(), Vec({0.6}));
  EXPECT_NEAR(build.dmp.anchor_cost, 0.36, 1e-6);
  EXPECT_NEAR(build.dmp.anchor_value_gradient(0), 1.2, 1e-6);
  EXPECT_EQ(build.dmp.xf_anchor(0), 0.6);
  EXPECT_LE(std::abs(build.reproduction_gap), build.residual_bound);
}

TEST(SampleDirectionTest, InfiniteThresholdSpacesAnchorsByStepLimit) {
  SamplerConfig config = LineConfig(0.0, 1.0);
  config.j_threshold = std::numeric_limits<double>::infinity();
  config.t_steps = 3;
  const DirectionResult result = SampleDirection(config, testing::IntegratorSettings());
  ASSERT_FALSE(result.aborted);
  const auto coordinates = AnchorCoordinates(result);
  ASSERT_EQ(coordinates.size(), 4u);
  for (std::size_t i = 0; i < coordinates.size(); ++i) {
    EXPECT_NEAR(coordinates[i], 0.3 * i, 1e-12);
  }
  EXPECT_EQ(result.trace.back().kind, TraceKind::kRegionExit);
}

TEST(SampleDirectionTest, SingleStepLimitIsUniform) {
  SamplerConfig config = LineConfig(0.0, 0.5);
  config.t_steps = 1;
  const auto coordinates = AnchorCoordinates(SampleDirection(config, testing::IntegratorSettings()));
  ASSERT_EQ(coordinates.size(), 6u);
  for (std::size_t i = 1; i < coordinates.size(); ++i) {
    EXPECT_NEAR(coordinates[i] - coordinates[i - 1], 0.1, 1e-12);
  }
}

TEST(SampleDirectionTest, TraceIsSoundAndTerminates) {
  for (double threshold : {1e-3, 0.01, 0.1}) {
    SamplerConfig config = LineConfig(-1.0, 1.0, -1.0);
    config.j_threshold = threshold;
    config.t_samples = 8;
    config.t_steps = 4;
    const DirectionResult result = SampleDirection(config, testing::IntegratorSettings());
    ASSERT_FALSE(result.aborted);
    EXPECT_LE(result.grid.size(), config.t_samples);
    const TraceKind last = result.trace.back().kind;
    EXPECT_TRUE(last == TraceKind::kRegionExit || last == TraceKind::kBudgetExhausted);
    if (last == TraceKind::kBudgetExhausted) {
      EXPECT_EQ(result.grid.size(), config.t_samples);
    }

    int anchors = 0;
    for (const TraceEvent& event : result.trace) {
      if (event.kind == TraceKind::kAnchor) {
        EXPECT_EQ(event.anchor, anchors);
        EXPECT_EQ(event.coordinate, result.grid.coordinates[0][anchors]);
        ++anchors;
      }
      if (event.kind != TraceKind::kStep) continue;
      EXPECT_GE(event.steps, 1);
      EXPECT_LE(event.steps, config.t_steps);
      EXPECT_TRUE(config.region.Contains(event.point));
      const bool should_reanchor =
          event.gap >= config.j_threshold || event.steps >= config.t_steps;
      EXPECT_EQ(event.reanchor, should_reanchor);
    }
    EXPECT_EQ(anchors, result.grid.size());
    // every accepted step stays below the threshold
    for (std::size_t i = 0; i < result.records.size(); ++i) {
      EXPECT_LT(result.records[i].accepted_forward, config.t_steps * config.delta_x);
    }
    ValidateGrid(result.grid);
  }
}

TEST(SampleDirectionTest, SmallerThresholdNeverGivesFewerAnchors) {
  int previous = 0;
  for (double threshold : {0.1, 0.02, 0.005}) {
    SamplerConfig config = LineConfig(-1.0, 1.0, -1.0);
    config.j_threshold = threshold;
    config.t_steps = 20;
    const int count = SampleDirection(config, testing::IntegratorSettings()).grid.size();
    EXPECT_GE(count, previous);
    previous = count;
  }
  EXPECT_GT(previous, 2);
}

TEST(SampleDirectionTest, SolverFailureAbortsWithPartialGrid) {
  AnchorSettings settings = testing::IntegratorSettings();
  settings.dynamics.drift = [](const Vector& x) {
    return Vector::Constant(1, x(0) > 0.65 ? std::numeric_limits<double>::quiet_NaN() : 0.0);
  };
  SamplerConfig config = LineConfig(0.0, 2.0);
  config.j_threshold = std::numeric_limits<double>::infinity();
  config.t_steps = 3;
  const DirectionResult result = SampleDirection(config, settings);
  EXPECT_TRUE(result.aborted);
  EXPECT_FALSE(result.error.empty());
  EXPECT_EQ(result.trace.back().kind, TraceKind::kAborted);
  ASSERT_EQ(result.grid.size(), 3);
  EXPECT_NEAR(result.grid.coordinates[0].back(), 0.6, 1e-12);
  ValidateGrid(result.grid);
}

TEST(SampleLineTest, MergesBothSensesWithinBudget) {
  SamplerConfig config = LineConfig(-1.0, 1.0);
  config.j_threshold = std::numeric_limits<double>::infinity();
  config.t_steps = 2;
  config.t_samples = 5;
  const DirectionResult result = SampleLine(config, testing::IntegratorSettings());
  ASSERT_FALSE(result.aborted);
  const std::vector<double> expected = {-0.4, -0.2, 0.0, 0.2, 0.4};
  ASSERT_EQ(result.grid.size(), 5);
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(result.grid.coordinates[0][i], expected[i], 1e-12);
    EXPECT_NEAR(result.grid.anchors[i].xf_anchor(0), expected[i], 1e-12);
  }
  ValidateGrid(result.grid);
  for (const TraceEvent& event : result.trace) {
    if (event.kind == TraceKind::kAnchor) {
      EXPECT_NEAR(result.grid.coordinates[0][event.anchor], event.coordinate, 1e-12);
    }
  }
}

TEST(SampleLineTest, UnusedBudgetPassesToTheOtherSense) {
  SamplerConfig config = LineConfig(-1.0, 0.2);
  config.j_threshold = std::numeric_limits<double>::infinity();
  config.t_steps = 2;
  config.t_samples = 6;
  const DirectionResult result = SampleLine(config, testing::IntegratorSettings());
  // the + sense leaves the region after one extra anchor
  ASSERT_EQ(result.grid.size(), 6);
  EXPECT_NEAR(result.grid.coordinates[0].front(), -0.8, 1e-12);
  EXPECT_NEAR(result.grid.coordinates[0].back(), 0.2, 1e-12);
}

SampleGrid LineGrid(const std::vector<double>& coordinates, const Vector& direction) {
  const AnchorSettings settings = PlanarSettings();
  SampleGrid grid;
  grid.region = Box{Vec({-1.0, -1.0}), Vec({1.0, 1.0})};
  grid.origin = Vec({0.0, 0.0});
  grid.directions = {direction};
  grid.coordinates = {coordinates};
  for (double c : coordinates) grid.anchors.push_back(BuildAnchor(settings, c * direction).dmp);
  return grid;
}

TEST(BuildGridTest, SingleAxisIsUnchanged) {
  const SampleGrid axis = LineGrid({-0.5, 0.0, 0.5}, Vec({1.0, 0.0}));
  const SampleGrid grid = BuildGrid({axis}, PlanarSettings(), 3);
  ASSERT_EQ(grid.size(), 3);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(grid.anchors[i].weights, axis.anchors[i].weights);
}

TEST(BuildGridTest, ProductSolvesOnlyOffAxisNodes) {
  const SampleGrid a = LineGrid({0.0, 0.5}, Vec({1.0, 0.0}));
  const SampleGrid b = LineGrid({-0.5, 0.0}, Vec({0.0, 1.0}));
  const SampleGrid grid = BuildGrid({a, b}, PlanarSettings(), 4);
  ASSERT_EQ(grid.size(), 4);
  EXPECT_EQ(grid.anchors[grid.FlatIndex({0, 1})].weights, a.anchors[0].weights);
  EXPECT_EQ(grid.anchors[grid.FlatIndex({1, 1})].weights, a.anchors[1].weights);
  EXPECT_EQ(grid.anchors[grid.FlatIndex({0, 0})].weights, b.anchors[0].weights);
  const Dmp& corner = grid.anchors[grid.FlatIndex({1, 0})];
  EXPECT_NEAR((corner.xf_anchor - Vec({0.5, -0.5})).norm(), 0.0, 1e-12);
  EXPECT_NEAR(corner.anchor_cost, 0.5, 1e-6);
}

TEST(BuildGridTest, BudgetIsCheckedBeforeAnySolve) {
  const SampleGrid a = LineGrid({-0.5, 0.0, 0.5}, Vec({1.0, 0.0}));
  const SampleGrid b = LineGrid({-0.5, 0.0, 0.5}, Vec({0.0, 1.0}));
  auto calls = std::make_shared<std::atomic<int>>(0);
  EXPECT_THROW(BuildGrid({a, b}, PlanarSettings(calls), 8), BudgetError);
  EXPECT_EQ(calls->load(), 0);
}

TEST(BuildGridTest, RejectsNonOrthogonalAxes) {
  const SampleGrid a = LineGrid({0.0, 0.5}, Vec({1.0, 0.0}));
  const SampleGrid b = LineGrid({0.0, 0.5}, Vec({std::sqrt(0.5), std::sqrt(0.5)}));
  auto calls = std::make_shared<std::atomic<int>>(0);
  EXPECT_THROW(BuildGrid({a, b}, PlanarSettings(calls), 10), ContractError);
  EXPECT_EQ(calls->load(), 0);
}

class QueryTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    grid_ = new SampleGrid(LineGrid({-0.6, -0.2, 0.2, 0.6}, Vec({1.0, 0.0})));
  }
  static void TearDownTestSuite() { delete grid_; }
  static SampleGrid* grid_;
};

SampleGrid* QueryTest::grid_ = nullptr;

TEST_F(QueryTest, NodeQueriesAreOneHot) {
  for (int i = 0; i < 4; ++i) {
    const Vector node = grid_->NodePoint({i});
    const QueryResult result = Query(*grid_, PlanarSettings(), node);
    double total = 0.0;
    for (std::size_t k = 0; k < result.vertices.size(); ++k) {
      EXPECT_EQ(result.weights[k], result.vertices[k] == i ? 1.0 : 0.0);
      total += result.weights[k];
    }
    EXPECT_EQ(total, 1.0);
    EXPECT_EQ(result.nearest, i);
    EXPECT_EQ(result.blended.weights, grid_->anchors[i].weights);
    EXPECT_FALSE(result.clamped);
  }
}

TEST_F(QueryTest, MidpointBlendsEqually) {
  const QueryResult result = Query(*grid_, PlanarSettings(), Vec({0.0, 0.0}));
  ASSERT_EQ(result.vertices, (std::vector<int>{1, 2}));
  EXPECT_NEAR(result.weights[0], 0.5, 1e-12);
  EXPECT_NEAR(result.weights[1], 0.5, 1e-12);
  const Matrix expected = 0.5 * (grid_->anchors[1].weights + grid_->anchors[2].weights);
  EXPECT_LT((result.blended.weights - expected).norm(), 1e-12 * (1 + expected.norm()));
  // equidistant: the lower index wins
  EXPECT_EQ(result.nearest, 1);
  EXPECT_EQ(NearestAnchor(*grid_, Vec({0.0, 0.0})), 1);
}

TEST_F(QueryTest, WeightsFormASimplexAndVaryContinuously) {
  Matrix previous;
  for (int k = 0; k <= 48; ++k) {
    const double x = -0.6 + 1.2 * k / 48.0;
    const QueryResult result = Query(*grid_, PlanarSettings(), Vec({x, 0.0}));
    double total = 0.0;
    for (double w : result.weights) {
      EXPECT_GE(w, 0.0);
      EXPECT_LE(w, 1.0);
      total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-14);
    if (k > 0) {
      const double scale = grid_->anchors[0].weights.norm() + grid_->anchors[3].weights.norm();
      EXPECT_LT((result.blended.weights - previous).norm(), 0.2 * scale);
    }
    previous = result.blended.weights;
  }
  const Matrix left = Query(*grid_, PlanarSettings(), Vec({0.2 - 1e-7, 0.0})).blended.weights;
  const Matrix right = Query(*grid_, PlanarSettings(), Vec({0.2 + 1e-7, 0.0})).blended.weights;
  EXPECT_LT((left - right).norm(), 1e-5 * (1 + left.norm()));
}

TEST_F(QueryTest, CostWeightedBlend) {
  const QueryResult result =
      Query(*grid_, PlanarSettings(), Vec({0.3, 0.0}), BlendMode::kCostWeighted);
  ASSERT_EQ(result.vertices, (std::vector<int>{2, 3}));
  const double a = 1.0 / (grid_->anchors[2].anchor_cost + kCostWeightEpsilon);
  const double b = 1.0 / (grid_->anchors[3].anchor_cost + kCostWeightEpsilon);
  EXPECT_NEAR(result.weights[0], a / (a + b), 1e-12);
  EXPECT_NEAR(result.weights[1], b / (a + b), 1e-12);
  EXPECT_GT(result.weights[0], result.weights[1]);
}

TEST_F(QueryTest, OutsideRegionOrSpanIsRejected) {
  EXPECT_THROW(Query(*grid_, PlanarSettings(), Vec({1.5, 0.0})), OutOfRegionError);
  EXPECT_THROW(Query(*grid_, PlanarSettings(), Vec({0.1, 0.1})), OutOfRegionError);
  EXPECT_THROW(Query(*grid_, PlanarSettings(), Vec({0.1})), ContractError);
  const QueryResult clamped = Query(*grid_, PlanarSettings(), Vec({0.9, 0.0}));
  EXPECT_TRUE(clamped.clamped);
  EXPECT_EQ(clamped.nearest, 3);
}

TEST_F(QueryTest, GridRoundTripsThroughDisk) {
  const std::filesystem::path directory =
      std::filesystem::temp_directory_path() / "optmotion_grid_roundtrip";
  std::filesystem::remove_all(directory);
  SaveGrid(*grid_, directory);
  const SampleGrid loaded = LoadGrid(directory);
  std::filesystem::remove_all(directory);
  ASSERT_EQ(loaded.size(), grid_->size());
  EXPECT_EQ(loaded.coordinates, grid_->coordinates);
  EXPECT_EQ(loaded.directions[0], grid_->directions[0]);
  EXPECT_EQ(loaded.region.lower, grid_->region.lower);
  EXPECT_EQ(loaded.region.upper, grid_->region.upper);
  for (int i = 0; i < loaded.size(); ++i) {
    EXPECT_EQ(loaded.anchors[i].weights, grid_->anchors[i].weights);
    EXPECT_EQ(loaded.anchors[i].anchor_cost, grid_->anchors[i].anchor_cost);
  }
  const Vector query = Vec({0.1, 0.0});
  EXPECT_EQ(Query(loaded, PlanarSettings(), query).report.dmp_cost,
            Query(*grid_, PlanarSettings(), query).report.dmp_cost);
}

TEST(SamplerConfigTest, RejectsInvalidConfigurations) {
  SamplerConfig config = LineConfig(0.0, 1.0);
  config.direction = Vec({2.0});
  EXPECT_THROW(ValidateSamplerConfig(config), ContractError);
  config = LineConfig(0.0, 1.0, 2.0);
  EXPECT_THROW(ValidateSamplerConfig(config), ContractError);
  config = LineConfig(0.0, 1.0);
  config.t_samples = 0;
  EXPECT_THROW(ValidateSamplerConfig(config), ContractError);
  config = LineConfig(0.0, 1.0);
  config.j_threshold = std::nan("");
  EXPECT_THROW(ValidateSamplerConfig(config), ContractError);
  AnchorSettings settings = testing::IntegratorSettings();
  settings.dynamics.actuation_inverse = nullptr;
  EXPECT_THROW(SampleDirection(LineConfig(0.0, 1.0), settings), CapabilityError);
}

}  // namespace
}  // namespace optmotion
