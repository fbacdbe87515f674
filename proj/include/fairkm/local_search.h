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

// Zone-constrained local search for fair k-means with outliers (LSFO).
//
// Terminology used throughout:
//   X_fair    all points except the fairness outliers Z0 chosen by seeding.
//   Z         the running outlier set; Z0 plus every cost-based discard.
//   outliers  the m points of X_fair (centers excluded) farthest from the
//             centers, whether or not they are already in Z.
//   hard zone ball of radius (gamma + 2) * delta(a) around a seeding anchor
//             a; every hard zone must hold at least one center.

#ifndef FAIRKM_LOCAL_SEARCH_H_
#define FAIRKM_LOCAL_SEARCH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairkm/dataset.h"
#include "fairkm/geometry.h"
#include "fairkm/random_source.h"
#include "fairkm/seeding.h"
#include "json.hpp"

namespace fairkm {

// Sum over `points` \ `excluded` of the squared distance to the nearest
// center. `excluded` need not be sorted. Throws ConfigError if centers is
// empty.
double cost(const PointSet& ps, std::span<const PointId> centers,
            std::span<const PointId> excluded,
            std::span<const PointId> points);

// The m non-center points of X \ base_excluded farthest from the centers,
// ties to the smaller id, returned sorted by id. Throws ConfigError when
// fewer than m candidates exist.
std::vector<PointId> farthest_m(const PointSet& ps,
                                std::span<const PointId> centers,
                                std::span<const PointId> base_excluded,
                                std::size_t m);

class HardZones {
 public:
  HardZones() = default;
  // One zone per anchor, radius (gamma + 2) * delta(anchor).
  HardZones(const PointSet& ps, const FairRadii& delta,
            std::span<const PointId> anchors, double gamma);

  std::size_t size() const { return anchors_.size(); }
  const std::vector<PointId>& anchors() const { return anchors_; }
  double radius(std::size_t zone) const { return radius_[zone]; }
  bool contains(std::size_t zone, PointId p) const {
    return member_[zone][static_cast<std::size_t>(p)] != 0;
  }

  // Every zone holds at least one of `centers`.
  bool satisfied_by(std::span<const PointId> centers) const;
  // Replacing `out` by `in` in `centers` keeps every zone occupied.
  bool swap_allowed(std::span<const PointId> centers, PointId out,
                    PointId in) const;

 private:
  std::vector<PointId> anchors_;
  std::vector<double> radius_;
  std::vector<std::vector<char>> member_;
};

// Independent audit by direct distance evaluation.
bool zones_hold(const PointSet& ps, const HardZones& zones,
                std::span<const PointId> centers);

struct ConstrainedLsResult {
  std::vector<PointId> centers;  // sorted
  std::size_t iterations = 0;
  std::size_t accepted_swaps = 0;
  std::size_t zone_violations = 0;  // audited accepted swaps only
  bool cap_hit = false;
};

// D^2-sampling local search over `points` (Algorithm "ConstrainedLS++").
// Each round samples p with probability proportional to its squared
// distance to the centers, takes the zone-respecting swap partner q that
// minimizes the cost, and keeps the swap only if the cost strictly drops.
// Rounds continue while the cost improves by a factor (1 - eps / k),
// k = |centers|, and at most max_iters rounds run.
ConstrainedLsResult constrained_ls_pp(const PointSet& ps,
                                      std::span<const PointId> points,
                                      const HardZones& zones,
                                      std::span<const PointId> centers,
                                      double eps, RandomSource& rng,
                                      std::size_t max_iters,
                                      bool audit_zones = false);

enum class Stage3Mode {
  kAuto,     // full up to kStage3FullLimit points, sampled above
  kFull,     // every (u, v) swap
  kSampled,  // `stage3_budget` uniformly drawn u per outer iteration
};
inline constexpr std::size_t kStage3FullLimit = 5000;

struct LsfoParams {
  std::size_t k = 0;
  std::size_t m = 0;
  double gamma = 3.0;
  double eps = 1e-4;
  Stage3Mode stage3 = Stage3Mode::kAuto;
  std::size_t stage3_budget = 512;
  std::optional<std::size_t> max_outer_iters;  // default: iteration_cap()
  std::optional<std::size_t> max_inner_iters;  // default: iteration_cap()
  DiscardPolicy discard_policy = DiscardPolicy::kLargestRadius;
  bool audit_zones = false;
};

// ceil((k / eps) * ln(n * aspect^2)), at least 1.
std::size_t iteration_cap(std::size_t k, double eps, std::size_t n,
                          double aspect);

struct IterationRecord {
  double cost_before = 0.0;
  double stage1_cost = 0.0;
  double stage2_cost = 0.0;  // after discarding outliers; = stage1 if m = 0
  double stage3_cost = kInfinity;  // best swap; infinity when none was legal
  bool accepted = false;
  std::string move;  // "none", "discard" or "swap <u> <v>"
  double cost_after = 0.0;
  std::size_t z_size = 0;
  std::size_t inner_iterations = 0;
  double ms = 0.0;
};

struct ClusteringState {
  std::vector<PointId> centers;            // sorted
  std::vector<PointId> outliers;           // Z, sorted, contains Z0
  std::vector<PointId> fairness_outliers;  // Z0, sorted
};

struct SolveReport {
  LsfoParams params;
  std::uint64_t seed = 0;
  ClusteringState state;
  HardZones zones;
  std::vector<PointId> anchors_s0;
  std::size_t padded_centers = 0;
  double cost = 0.0;  // over X_fair \ Z
  double rho = 0.0;   // over X \ Z
  double aspect = 1.0;
  std::vector<IterationRecord> iterations;
  std::size_t fallback_count = 0;
  bool cover_overflow = false;
  std::size_t iteration_limit = 0;
  bool cap_hit = false;
  std::size_t zone_violations = 0;
  double seeding_ms = 0.0;
  double search_ms = 0.0;
};

// Seeds with base_cent, pads or truncates to k centers, then alternates
// constrained local search, outlier discards and swap-plus-discard moves
// until an outer iteration fails to improve the cost by (1 - eps / k).
SolveReport lsfo(const PointSet& ps, const FairRadii& delta,
                 const LsfoParams& params, RandomSource& rng);

struct LocalOptimalityReport {
  bool condition1 = false;  // discarding outliers does not pay
  bool condition2 = false;  // no zone-respecting swap pays
  double discard_gain = 0.0;  // cost(S, Z + outliers) - cost(S, Z)
  std::size_t pairs_checked = 0;
  std::optional<std::pair<PointId, PointId>> violating_pair;  // (u, v)
  double violating_cost = 0.0;
  bool passed() const { return condition1 && condition2; }
};

// Re-derives both terminal conditions from scratch. `sampled_pairs`
// restricts the swap check to that many uniformly drawn (u, v) pairs.
LocalOptimalityReport local_optimality_check(
    const PointSet& ps, const ClusteringState& state, const HardZones& zones,
    std::size_t m, double eps, std::size_t k,
    std::optional<std::size_t> sampled_pairs = std::nullopt,
    RandomSource* rng = nullptr, double relative_slack = 1e-9);

// Deterministic report; wall-clock fields only when include_timings.
nlohmann::json to_json(const SolveReport& report, bool include_timings = false);

}  // namespace fairkm

#endif  // FAIRKM_LOCAL_SEARCH_H_
