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

// Anchor-based seeding with fairness outliers (BaseCent).
//
// The seeder grows a set of anchor points in increasing fair-radius order
// until every point p lies within gamma * delta(p) of some anchor, discards
// m fairness outliers, and, when more than k anchors survive, selects
// anchors by greedy set cover over the (gamma + 2)-relaxed zones.

#ifndef FAIRKM_SEEDING_H_
#define FAIRKM_SEEDING_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fairkm/dataset.h"
#include "fairkm/geometry.h"
#include "json.hpp"

namespace fairkm {

// Which m points become fairness outliers.
enum class DiscardPolicy {
  kLargestRadius,  // the m largest fair radii (default)
  kLastCovered,    // the m points covered by the latest anchor additions
};

struct AnchorZone {
  PointId anchor = 0;
  double radius_factor = 0.0;
  std::vector<PointId> members;  // sorted
};

// Result of the anchor-growing phase alone.
struct GreedyAnchors {
  std::vector<PointId> anchors;  // addition order; delta non-decreasing
  // Per point: index into `anchors` of the addition that first covered it.
  std::vector<std::int32_t> coverage_order;
};

GreedyAnchors greedy_anchors(const PointSet& ps, const FairRadii& delta,
                             double gamma);

struct SeedResult {
  std::vector<PointId> anchors_s0;   // set-cover pick order
  std::vector<PointId> outliers_z0;  // sorted
  std::vector<AnchorZone> zones;     // (gamma + 2) zones, parallel to anchors_s0
  std::vector<std::int32_t> coverage_order;
  std::vector<PointId> greedy_anchors;  // every anchor of the growing phase
  std::vector<PointId> surviving_anchors;  // greedy_anchors minus Z0
  // Survivors no (gamma + 2) zone reached, attached to their nearest anchor.
  std::size_t fallback_count = 0;
  // Set cover returned more than k anchors; only the first k are hard zones.
  bool cover_overflow = false;
  std::size_t hard_zone_count = 0;
};

// Throws ConfigError for k < 1, m > n - k or gamma < 1, and when every
// anchor is discarded so the survivors cannot be covered.
SeedResult base_cent(const PointSet& ps, const FairRadii& delta, std::size_t k,
                     std::size_t m, double gamma,
                     DiscardPolicy policy = DiscardPolicy::kLargestRadius);

// Greedy set cover: each step takes the set with the largest number of
// still-uncovered universe elements, ties to the smaller index. Returns set
// indices in pick order. Throws ConfigError if some element is in no set.
std::vector<std::size_t> greedy_set_cover(
    std::span<const PointId> universe,
    const std::vector<std::vector<PointId>>& sets);

struct CoverWitness {
  bool found = false;
  std::vector<PointId> anchors;         // at most k surviving anchors
  std::vector<PointId> extra_discards;  // at most m points beyond Z0
};

// Exhaustive check that some k surviving anchors' (gamma + 2) zones cover
// all of X \ Z0 after discarding m further points. Diagnostic only; throws
// GuardError above kCoverCheckMaxPoints points.
inline constexpr std::size_t kCoverCheckMaxPoints = 14;
CoverWitness verify_lemma1_cover(const SeedResult& seed, const PointSet& ps,
                                 const FairRadii& delta, std::size_t k,
                                 std::size_t m, double gamma);

nlohmann::json to_json(const SeedResult& seed);

}  // namespace fairkm

#endif  // FAIRKM_SEEDING_H_
