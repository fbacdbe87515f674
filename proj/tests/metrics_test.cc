// Copyright 2026 The fairkm Authors.
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

#include "fairkm/metrics.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fairkm/error.h"
#include "fairkm/local_search.h"
#include "test_util.h"

namespace fairkm {
namespace {

using testing::AllIds;
using testing::Line;
using testing::RandomPoints;

FairRadii Radii(std::vector<double> delta) {
  FairRadii r;
  r.delta = std::move(delta);
  return r;
}

// Checks a claimed optimum against the fairness constraint directly.
bool Feasible(const PointSet& ps, const FairRadii& delta, std::size_t k,
              std::size_t m, double gamma, const OracleResult& r) {
  if (r.centers.empty() || r.centers.size() > k || r.outliers.size() > m) return false;
  double total = 0.0;
  for (PointId p : AllIds(ps.size())) {
    if (std::find(r.outliers.begin(), r.outliers.end(), p) != r.outliers.end()) {
      if (std::find(r.centers.begin(), r.centers.end(), p) != r.centers.end()) return false;
      continue;
    }
    const double d = dist_to_set(ps, p, r.centers);
    if (d > gamma * delta[p]) return false;
    total += d * d;
  }
  return std::abs(total - r.cost) <= 1e-9 * std::max(1.0, total);
}

TEST(MaxBoundRatioTest, AllCentersGiveZero) {
  const PointSet ps = Line({0, 1, 2});
  const std::vector<PointId> all = AllIds(3);
  EXPECT_EQ(max_bound_ratio(ps, all, {}, Radii({1, 1, 1})), 0.0);
}

TEST(MaxBoundRatioTest, DirectMaximum) {
  const PointSet ps = Line({0, 1, 2});
  const std::vector<PointId> centers = {0};
  EXPECT_DOUBLE_EQ(max_bound_ratio(ps, centers, {}, Radii({1, 1, 1})), 2.0);
  const std::vector<PointId> outliers = {2};
  EXPECT_DOUBLE_EQ(max_bound_ratio(ps, centers, outliers, Radii({1, 1, 1})), 1.0);
}

TEST(MaxBoundRatioTest, ZeroRadius) {
  const PointSet ps = Line({0, 0, 3});
  const std::vector<PointId> centers = {0};
  EXPECT_EQ(max_bound_ratio(ps, centers, std::vector<PointId>{2}, Radii({0, 0, 1})), 0.0);
  EXPECT_EQ(max_bound_ratio(ps, centers, {}, Radii({0, 0, 0})), kInfinity);
  EXPECT_THROW(max_bound_ratio(ps, {}, {}, Radii({1, 1, 1})), Error);
}

TEST(MaxBoundRatioTest, AgreesWithLsfoReport) {
  RandomSource data(19);
  const PointSet ps = RandomPoints(120, 2, data);
  const FairRadii delta = fair_radii(ps, 3);
  LsfoParams params;
  params.k = 3;
  params.m = 2;
  params.gamma = 1.0;
  RandomSource rng(1);
  const SolveReport r = lsfo(ps, delta, params, rng);
  double rho = 0.0;
  for (PointId p : AllIds(ps.size())) {
    if (std::binary_search(r.state.outliers.begin(), r.state.outliers.end(), p)) continue;
    rho = std::max(rho, dist_to_set(ps, p, r.state.centers) / delta[p]);
  }
  EXPECT_NEAR(r.rho, rho, 1e-12 * rho);
  EXPECT_NEAR(max_bound_ratio(ps, r.state.centers, r.state.outliers, delta), rho,
              1e-12 * rho);
}

TEST(GreedyBaselineTest, SeparableClustersUseAnchors) {
  const PointSet ps = Line({0, 1, 100, 101});
  const FairRadii delta = Radii({1, 1, 1, 1});
  RandomSource rng(1);
  const EvalSummary s = greedy_baseline(ps, delta, 2, 1.0, rng);
  EXPECT_EQ(s.centers, (std::vector<PointId>{0, 2}));
  EXPECT_DOUBLE_EQ(s.kmeans_cost, 2.0);
  EXPECT_LE(s.rho, 1.0);
  EXPECT_EQ(s.n_outliers, 0u);
}

TEST(GreedyBaselineTest, TruncatesAndPads) {
  const PointSet ps = Line({0, 100, 200, 300});
  const FairRadii delta = Radii({1, 1, 1, 1});
  RandomSource rng(1);
  EXPECT_EQ(greedy_baseline(ps, delta, 2, 1.0, rng).centers,
            (std::vector<PointId>{0, 1}));
  const PointSet line = Line({0, 1, 2, 3});
  const EvalSummary padded = greedy_baseline(line, Radii({9, 9, 9, 9}), 3, 1.0, rng);
  EXPECT_EQ(padded.centers.size(), 3u);
  EXPECT_TRUE(std::binary_search(padded.centers.begin(), padded.centers.end(), 0));
}

TEST(OracleTest, AllCentersCostNothing) {
  const PointSet ps = Line({0, 4, 9});
  const FairRadii delta = fair_radii(ps, 3);
  const OracleResult r = brute_force_opt(ps, delta, 3, 0, 1.0);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.cost, 0.0);
  EXPECT_EQ(r.centers, (std::vector<PointId>{0, 1, 2}));
}

TEST(OracleTest, ThreePointLine) {
  // Discarding 10 and serving 1 from 0 is the cheapest choice.
  const PointSet ps = Line({0, 1, 10});
  const FairRadii delta = fair_radii(ps, 1);
  const OracleResult r = brute_force_opt(ps, delta, 1, 1, 100.0);
  ASSERT_TRUE(r.feasible);
  EXPECT_DOUBLE_EQ(r.cost, 1.0);
  EXPECT_EQ(r.centers, (std::vector<PointId>{0}));
  EXPECT_EQ(r.outliers, (std::vector<PointId>{2}));
}

TEST(OracleTest, SeparatedPointsAreInfeasible) {
  const PointSet ps = Line({0, 100, 200, 300});
  const OracleResult r = brute_force_opt(ps, Radii({1, 1, 1, 1}), 2, 1, 1.0);
  EXPECT_FALSE(r.feasible);
}

TEST(OracleTest, GuardRefusesLargeInstances) {
  RandomSource rng(1);
  const PointSet ps = RandomPoints(15, 1, rng);
  try {
    brute_force_opt(ps, fair_radii(ps, 2), 2, 1, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kGuard);
  }
}

TEST(OracleTest, FeasibleAndMonotoneInGamma) {
  RandomSource rng(404);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4 + rng.UniformIndex(7);
    const std::size_t k = 1 + rng.UniformIndex(3);
    const std::size_t m = rng.UniformIndex(3);
    const PointSet ps = RandomPoints(n, 2, rng);
    const FairRadii delta = fair_radii(ps, k);
    double previous = kInfinity;
    for (double gamma : {1.0, 2.0, 3.0, 5.0}) {
      const OracleResult r = brute_force_opt(ps, delta, k, m, gamma);
      if (!r.feasible) {
        EXPECT_EQ(previous, kInfinity);
        continue;
      }
      EXPECT_TRUE(Feasible(ps, delta, k, m, gamma, r)) << "trial " << trial;
      EXPECT_LE(r.cost, previous);
      previous = r.cost;
    }
  }
}

TEST(OutlierBoundTest, ClosedForm) {
  AspectRatio a;
  EXPECT_EQ(outlier_bound(0, 5, 1e-4, 100, a), 0.0);
  a.delta_max_over_min = std::exp(1.0);
  EXPECT_NEAR(outlier_bound(1, 1, 1.0, 1, a), 2.0, 1e-12);
  a.delta_max_over_min = 10.0;
  EXPECT_NEAR(outlier_bound(40, 10, 1e-4, 4000, a),
              40.0 + 4e6 * std::log(40000.0), 1e-3);
}

}  // namespace
}  // namespace fairkm
