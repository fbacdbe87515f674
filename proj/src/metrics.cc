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
#include <chrono>
#include <cmath>
#include <numeric>

#include "fairkm/error.h"
#include "fairkm/local_search.h"
#include "fairkm/seeding.h"

namespace fairkm {

double max_bound_ratio(const PointSet& ps, std::span<const PointId> centers,
                       std::span<const PointId> outliers,
                       const FairRadii& delta) {
  if (centers.empty()) throw ConfigError("max bound ratio needs a center");
  std::vector<char> skip(ps.size(), 0);
  for (PointId z : outliers) skip[static_cast<std::size_t>(z)] = 1;
  double rho = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (skip[i]) continue;
    const auto p = static_cast<PointId>(i);
    const double d = dist_to_set(ps, p, centers);
    if (d == 0.0) continue;
    rho = std::max(rho, delta[p] > 0.0 ? d / delta[p] : kInfinity);
  }
  return rho;
}

EvalSummary greedy_baseline(const PointSet& ps, const FairRadii& delta,
                            std::size_t k, double gamma, RandomSource& rng) {
  const auto start = std::chrono::steady_clock::now();
  if (k < 1 || k > ps.size()) throw ConfigError("k outside [1, n]");
  if (!(gamma >= 1.0)) throw ConfigError("gamma must be at least 1");
  GreedyAnchors grown = greedy_anchors(ps, delta, gamma);
  std::vector<PointId> centers = grown.anchors;
  if (centers.size() > k) {
    centers.resize(k);
  } else if (centers.size() < k) {
    std::vector<char> taken(ps.size(), 0);
    for (PointId a : centers) taken[static_cast<std::size_t>(a)] = 1;
    std::vector<PointId> pool;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (!taken[i]) pool.push_back(static_cast<PointId>(i));
    }
    for (std::size_t idx :
         rng.SampleWithoutReplacement(pool.size(), k - centers.size())) {
      centers.push_back(pool[idx]);
    }
  }
  std::sort(centers.begin(), centers.end());
  std::vector<PointId> all(ps.size());
  std::iota(all.begin(), all.end(), 0);

  EvalSummary out;
  out.kmeans_cost = cost(ps, centers, {}, all);
  out.rho = max_bound_ratio(ps, centers, {}, delta);
  out.n_outliers = 0;
  out.centers = centers;
  out.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return out;
}

namespace {

// Calls visit(subset) for every subset of [0, n) of size r, lexicographic.
template <typename Visit>
void Combinations(std::size_t n, std::size_t r, Visit&& visit) {
  if (r > n) return;
  std::vector<std::size_t> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    visit(idx);
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

OracleResult brute_force_opt(const PointSet& ps, const FairRadii& delta,
                             std::size_t k, std::size_t m, double gamma,
                             const OracleLimits& limits) {
  const std::size_t n = ps.size();
  if (n > limits.max_n || k > limits.max_k || m > limits.max_m) {
    throw GuardError("oracle enumeration refused: needs n <= " +
                     std::to_string(limits.max_n) + ", k <= " +
                     std::to_string(limits.max_k) + ", m <= " +
                     std::to_string(limits.max_m) + " (got n = " +
                     std::to_string(n) + ", k = " + std::to_string(k) +
                     ", m = " + std::to_string(m) + ")");
  }
  if (k < 1) throw ConfigError("k must be at least 1");

  std::vector<std::vector<double>> dist(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      dist[i][j] = distance(ps.row(static_cast<PointId>(i)),
                            ps.row(static_cast<PointId>(j)));
    }
  }

  OracleResult best;
  for (std::size_t zs = 0; zs <= std::min(m, n); ++zs) {
    Combinations(n, zs, [&](const std::vector<std::size_t>& z) {
      std::vector<char> out(n, 0);
      for (std::size_t i : z) out[i] = 1;
      std::vector<std::size_t> kept;
      for (std::size_t i = 0; i < n; ++i) {
        if (!out[i]) kept.push_back(i);
      }
      for (std::size_t ss = 1; ss <= std::min(k, kept.size()); ++ss) {
        Combinations(kept.size(), ss, [&](const std::vector<std::size_t>& pick) {
          double total = 0.0;
          for (std::size_t p : kept) {
            double d = kInfinity;
            for (std::size_t j : pick) d = std::min(d, dist[p][kept[j]]);
            if (d > gamma * delta[static_cast<PointId>(p)]) return;
            total += d * d;
          }
          if (!best.feasible || total < best.cost) {
            best.feasible = true;
            best.cost = total;
            best.centers.clear();
            for (std::size_t j : pick) best.centers.push_back(static_cast<PointId>(kept[j]));
            best.outliers.assign(z.begin(), z.end());
          }
        });
      }
    });
  }
  return best;
}

double outlier_bound(std::size_t m, std::size_t k, double eps, std::size_t n,
                     const AspectRatio& aspect) {
  if (m == 0) return 0.0;
  const double md = static_cast<double>(m);
  return md + (md * static_cast<double>(k) / eps) *
                  std::log(static_cast<double>(n) * aspect.delta_max_over_min);
}

}  // namespace fairkm
