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

#include "fairkm/seeding.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairkm/error.h"
#include "fairkm/parallel.h"

namespace fairkm {

namespace {

// Calls visit(subset) for every size-r subset of [0, n) in lexicographic
// order; stops early when visit returns true. Returns whether it stopped.
template <typename Visit>
bool ForEachSubset(std::size_t n, std::size_t r, Visit&& visit) {
  if (r > n) return false;
  std::vector<std::size_t> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (visit(std::span<const std::size_t>(idx))) return true;
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + (i - 1)) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Members of X \ Z0 strictly inside anchor a's (gamma + 2) relaxed zone.
std::vector<PointId> RelaxedZone(const PointSet& ps, const FairRadii& delta,
                                 const std::vector<char>& discarded, PointId a,
                                 double gamma) {
  std::vector<PointId> members;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto x = static_cast<PointId>(i);
    if (discarded[i]) continue;
    if (distance(ps.row(x), ps.row(a)) < (gamma + 2.0) * delta[x]) {
      members.push_back(x);
    }
  }
  return members;
}

}  // namespace

GreedyAnchors greedy_anchors(const PointSet& ps, const FairRadii& delta,
                             double gamma) {
  const std::size_t n = ps.size();
  if (delta.size() != n) throw ConfigError("fair radii do not match the point set");
  GreedyAnchors out;
  out.coverage_order.assign(n, -1);

  // Visiting points by (delta, id) and promoting each still-uncovered one
  // is the same as repeatedly taking the uncovered point of minimum delta.
  std::vector<PointId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](PointId a, PointId b) {
    return delta[a] != delta[b] ? delta[a] < delta[b] : a < b;
  });
  std::vector<double> dist(n, kInfinity);
  for (PointId candidate : order) {
    const auto c = static_cast<std::size_t>(candidate);
    if (!(dist[c] > gamma * delta[candidate])) continue;
    const auto anchor_index = static_cast<std::int32_t>(out.anchors.size());
    out.anchors.push_back(candidate);
    const auto a = ps.row(candidate);
    ParallelFor(n, [&](std::size_t i) {
      const auto x = static_cast<PointId>(i);
      dist[i] = std::min(dist[i], std::sqrt(squared_distance(ps.row(x), a)));
      if (out.coverage_order[i] < 0 && !(dist[i] > gamma * delta[x])) {
        out.coverage_order[i] = anchor_index;
      }
    }, 2048);
  }
  return out;
}

std::vector<std::size_t> greedy_set_cover(
    std::span<const PointId> universe,
    const std::vector<std::vector<PointId>>& sets) {
  std::vector<PointId> elems(universe.begin(), universe.end());
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  auto position = [&](PointId x) -> std::ptrdiff_t {
    auto it = std::lower_bound(elems.begin(), elems.end(), x);
    return (it != elems.end() && *it == x) ? it - elems.begin() : -1;
  };

  // Inverted index: element position -> sets containing it.
  std::vector<std::vector<std::size_t>> containing(elems.size());
  std::vector<std::size_t> gain(sets.size(), 0);
  for (std::size_t j = 0; j < sets.size(); ++j) {
    std::vector<PointId> s = sets[j];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (PointId x : s) {
      const auto pos = position(x);
      if (pos < 0) continue;
      containing[static_cast<std::size_t>(pos)].push_back(j);
      ++gain[j];
    }
  }
  for (std::size_t e = 0; e < elems.size(); ++e) {
    if (containing[e].empty()) {
      throw ConfigError("set cover impossible: element " +
                        std::to_string(elems[e]) + " is in no set");
    }
  }

  std::vector<char> covered(elems.size(), 0);
  std::size_t remaining = elems.size();
  std::vector<std::size_t> picks;
  while (remaining > 0) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < sets.size(); ++j) {
      if (gain[j] > gain[best]) best = j;
    }
    if (gain[best] == 0) throw InvariantError("set cover stalled");
    picks.push_back(best);
    for (PointId x : sets[best]) {
      const auto pos = position(x);
      if (pos < 0 || covered[static_cast<std::size_t>(pos)]) continue;
      covered[static_cast<std::size_t>(pos)] = 1;
      --remaining;
      for (std::size_t j : containing[static_cast<std::size_t>(pos)]) --gain[j];
    }
  }
  return picks;
}

SeedResult base_cent(const PointSet& ps, const FairRadii& delta, std::size_t k,
                     std::size_t m, double gamma, DiscardPolicy policy) {
  const std::size_t n = ps.size();
  if (k < 1) throw ConfigError("k must be at least 1");
  if (k > n || m > n - k) {
    throw ConfigError("infeasible outlier budget: m = " + std::to_string(m) +
                      " exceeds n - k = " +
                      std::to_string(k > n ? 0 : n - k));
  }
  if (!(gamma >= 1.0)) throw ConfigError("gamma must be at least 1");

  SeedResult out;
  GreedyAnchors grown = greedy_anchors(ps, delta, gamma);
  out.greedy_anchors = grown.anchors;
  out.coverage_order = grown.coverage_order;

  // Fairness outliers.
  std::vector<PointId> by_priority(n);
  std::iota(by_priority.begin(), by_priority.end(), 0);
  if (policy == DiscardPolicy::kLargestRadius) {
    std::sort(by_priority.begin(), by_priority.end(), [&](PointId a, PointId b) {
      return delta[a] != delta[b] ? delta[a] > delta[b] : a < b;
    });
  } else {
    const auto& order = out.coverage_order;
    std::sort(by_priority.begin(), by_priority.end(), [&](PointId a, PointId b) {
      if (order[a] != order[b]) return order[a] > order[b];
      return delta[a] != delta[b] ? delta[a] > delta[b] : a < b;
    });
  }
  std::vector<char> discarded(n, 0);
  for (std::size_t i = 0; i < m; ++i) {
    discarded[static_cast<std::size_t>(by_priority[i])] = 1;
    out.outliers_z0.push_back(by_priority[i]);
  }
  std::sort(out.outliers_z0.begin(), out.outliers_z0.end());

  // An anchor's own zone holds the anchor, so it empties exactly when the
  // anchor itself is discarded.
  for (PointId a : grown.anchors) {
    if (!discarded[static_cast<std::size_t>(a)]) out.surviving_anchors.push_back(a);
  }
  const auto& survivors = out.surviving_anchors;
  if (survivors.empty()) {
    throw ConfigError("every anchor was discarded as a fairness outlier; "
                      "the remaining points cannot be covered");
  }

  std::vector<std::vector<PointId>> cover_sets(survivors.size());
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    cover_sets[i] = RelaxedZone(ps, delta, discarded, survivors[i], gamma);
  }
  std::vector<char> reached(n, 0);
  for (const auto& s : cover_sets) {
    for (PointId x : s) reached[static_cast<std::size_t>(x)] = 1;
  }
  std::vector<PointId> universe;
  for (std::size_t i = 0; i < n; ++i) {
    if (discarded[i]) continue;
    universe.push_back(static_cast<PointId>(i));
    if (reached[i]) continue;
    // Fallback: nearest surviving anchor, ties to the smaller id.
    const auto x = static_cast<PointId>(i);
    std::size_t best = 0;
    double best_d = kInfinity;
    for (std::size_t j = 0; j < survivors.size(); ++j) {
      const double dj = squared_distance(ps.row(x), ps.row(survivors[j]));
      if (dj < best_d || (dj == best_d && survivors[j] < survivors[best])) {
        best = j;
        best_d = dj;
      }
    }
    auto& target = cover_sets[best];
    target.insert(std::lower_bound(target.begin(), target.end(), x), x);
    ++out.fallback_count;
  }

  std::vector<std::size_t> chosen;
  if (survivors.size() <= k) {
    chosen.resize(survivors.size());
    std::iota(chosen.begin(), chosen.end(), 0);
  } else {
    chosen = greedy_set_cover(universe, cover_sets);
  }
  for (std::size_t j : chosen) {
    out.anchors_s0.push_back(survivors[j]);
    out.zones.push_back(AnchorZone{survivors[j], gamma + 2.0, cover_sets[j]});
  }
  out.cover_overflow = out.anchors_s0.size() > k;
  out.hard_zone_count = std::min(k, out.anchors_s0.size());
  return out;
}

CoverWitness verify_lemma1_cover(const SeedResult& seed, const PointSet& ps,
                                 const FairRadii& delta, std::size_t k,
                                 std::size_t m, double gamma) {
  const std::size_t n = ps.size();
  if (n > kCoverCheckMaxPoints) {
    throw GuardError("cover enumeration refused: n = " + std::to_string(n) +
                     " exceeds " + std::to_string(kCoverCheckMaxPoints));
  }
  std::vector<char> discarded(n, 0);
  for (PointId z : seed.outliers_z0) discarded[static_cast<std::size_t>(z)] = 1;
  std::vector<PointId> rest;
  for (std::size_t i = 0; i < n; ++i) {
    if (!discarded[i]) rest.push_back(static_cast<PointId>(i));
  }
  const auto& anchors = seed.surviving_anchors;
  // Zones as bit masks over positions in `rest`.
  std::vector<std::uint32_t> zone_mask(anchors.size(), 0);
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    for (std::size_t r = 0; r < rest.size(); ++r) {
      if (distance(ps.row(rest[r]), ps.row(anchors[j])) <
          (gamma + 2.0) * delta[rest[r]]) {
        zone_mask[j] |= 1u << r;
      }
    }
  }
  const std::uint32_t all = rest.size() == 32 ? ~0u : (1u << rest.size()) - 1u;
  const std::size_t anchor_pick = std::min(k, anchors.size());
  const std::size_t discard_pick = std::min(m, rest.size());

  CoverWitness witness;
  ForEachSubset(rest.size(), discard_pick, [&](std::span<const std::size_t> drop) {
    std::uint32_t need = all;
    for (std::size_t r : drop) need &= ~(1u << r);
    return ForEachSubset(anchors.size(), anchor_pick,
                         [&](std::span<const std::size_t> pick) {
      std::uint32_t got = 0;
      for (std::size_t j : pick) got |= zone_mask[j];
      if ((got & need) != need) return false;
      witness.found = true;
      for (std::size_t j : pick) witness.anchors.push_back(anchors[j]);
      for (std::size_t r : drop) witness.extra_discards.push_back(rest[r]);
      return true;
    });
  });
  return witness;
}

nlohmann::json to_json(const SeedResult& seed) {
  nlohmann::json zones = nlohmann::json::array();
  for (const auto& z : seed.zones) {
    zones.push_back({{"anchor", z.anchor}, {"members_count", z.members.size()}});
  }
  return {{"anchors", seed.anchors_s0},
          {"outliers", seed.outliers_z0},
          {"zones", zones},
          {"fallback_count", seed.fallback_count},
          {"cover_overflow", seed.cover_overflow}};
}

}  // namespace fairkm
