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

// Evaluation: k-means cost, max bound ratio, the Greedy baseline, the
// exhaustive optimum for tiny instances and the outlier-count bound.

#ifndef FAIRKM_METRICS_H_
#define FAIRKM_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fairkm/dataset.h"
#include "fairkm/geometry.h"
#include "fairkm/random_source.h"

namespace fairkm {

struct EvalSummary {
  double kmeans_cost = 0.0;
  double rho = 0.0;
  std::size_t n_outliers = 0;
  std::int64_t runtime_ms = 0;
  double bound_m_plus = 0.0;
  std::vector<PointId> centers;
};

// max over p outside `outliers` of d(p, S) / delta(p). A point at distance
// 0 contributes 0; delta(p) = 0 with d > 0 contributes +infinity.
double max_bound_ratio(const PointSet& ps, std::span<const PointId> centers,
                       std::span<const PointId> outliers,
                       const FairRadii& delta);

// Anchors of the growing phase used directly as centers: the first k when
// there are more, padded with uniform non-anchor points when fewer. Cost
// and rho are taken over all points.
EvalSummary greedy_baseline(const PointSet& ps, const FairRadii& delta,
                            std::size_t k, double gamma, RandomSource& rng);

struct OracleLimits {
  std::size_t max_n = 14;
  std::size_t max_k = 3;
  std::size_t max_m = 2;
};

struct OracleResult {
  bool feasible = false;
  double cost = kInfinity;
  std::vector<PointId> centers;
  std::vector<PointId> outliers;
};

// Exhaustive optimum over |Z| <= m and nonempty S subset of X \ Z with
// |S| <= k, subject to d(p, S) <= gamma * delta(p) for every p in X \ Z.
// Throws GuardError beyond `limits`.
OracleResult brute_force_opt(const PointSet& ps, const FairRadii& delta,
                             std::size_t k, std::size_t m, double gamma,
                             const OracleLimits& limits = {});

// m + (m k / eps) ln(n * aspect), natural log.
double outlier_bound(std::size_t m, std::size_t k, double eps, std::size_t n,
                     const AspectRatio& aspect);

}  // namespace fairkm

#endif  // FAIRKM_METRICS_H_
