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

#include "fairkm/local_search.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "fairkm/error.h"
#include "fairkm/parallel.h"

namespace fairkm {

namespace {

using Clock = std::chrono::steady_clock;

double MillisSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Larger residual first, then smaller id.
struct FartherFirst {
  bool operator()(const std::pair<double, PointId>& a,
                  const std::pair<double, PointId>& b) const {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  }
};

std::vector<PointId> Sorted(std::span<const PointId> ids) {
  std::vector<PointId> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PointId> Swapped(std::span<const PointId> centers, PointId out,
                             PointId in) {
  std::vector<PointId> next;
  next.reserve(centers.size());
  for (PointId c : centers) {
    if (c != out) next.push_back(c);
  }
  next.insert(std::lower_bound(next.begin(), next.end(), in), in);
  return next;
}

std::vector<PointId> Union(const std::vector<PointId>& a,
                           const std::vector<PointId>& b) {
  std::vector<PointId> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Nearest / second-nearest center bookkeeping over a fixed universe of
// points (X_fair during LSFO). Points in the running outlier set stay in
// the universe, flagged `excluded`, because outlier selection ranks them too.
class SearchSpace {
 public:
  SearchSpace(const PointSet& ps, std::vector<PointId> universe)
      : ps_(ps),
        ids_(std::move(universe)),
        excluded_(ids_.size(), 0),
        best1_(ids_.size()),
        best2_(ids_.size()),
        nearest_(ids_.size()),
        nearest_index_(ids_.size()),
        position_(ps.size(), -1) {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      position_[static_cast<std::size_t>(ids_[i])] = static_cast<std::int64_t>(i);
    }
  }

  std::size_t size() const { return ids_.size(); }
  PointId id(std::size_t i) const { return ids_[i]; }
  bool excluded(std::size_t i) const { return excluded_[i] != 0; }
  const std::vector<PointId>& centers() const { return centers_; }
  std::int64_t position(PointId id) const {
    return position_[static_cast<std::size_t>(id)];
  }

  void SetExcluded(const std::vector<PointId>& outliers) {
    std::fill(excluded_.begin(), excluded_.end(), 0);
    for (PointId z : outliers) {
      const auto pos = position(z);
      if (pos >= 0) excluded_[static_cast<std::size_t>(pos)] = 1;
    }
  }

  // Recomputes every cached distance from scratch.
  void Assign(std::vector<PointId> centers) {
    centers_ = std::move(centers);
    is_center_.assign(ps_.size(), 0);
    for (PointId c : centers_) is_center_[static_cast<std::size_t>(c)] = 1;
    ParallelFor(ids_.size(), [&](std::size_t i) {
      const auto p = ps_.row(ids_[i]);
      double b1 = kInfinity, b2 = kInfinity;
      std::size_t near = 0;
      for (std::size_t j = 0; j < centers_.size(); ++j) {
        const double s = squared_distance(p, ps_.row(centers_[j]));
        if (s < b1) {
          b2 = b1;
          b1 = s;
          near = j;
        } else if (s < b2) {
          b2 = s;
        }
      }
      best1_[i] = b1;
      best2_[i] = b2;
      nearest_[i] = centers_[near];
      nearest_index_[i] = static_cast<std::uint32_t>(near);
    }, 1024);
    removal_orders_.clear();
  }

  bool is_center(PointId id) const {
    return is_center_[static_cast<std::size_t>(id)] != 0;
  }

  double residual(std::size_t i) const { return best1_[i]; }

  // Residual of position i after replacing center `out` by a point whose
  // squared distance to i is `to_in`.
  double SwappedResidual(std::size_t i, PointId out, double to_in) const {
    return std::min(to_in, nearest_[i] == out ? best2_[i] : best1_[i]);
  }

  // totals[j] = non-excluded cost after replacing centers()[j] by a point
  // with squared distances `to_in`. One pass for all j.
  void SwapTotals(const std::vector<double>& to_in,
                  std::vector<double>& totals) const {
    totals.assign(centers_.size(), 0.0);
    double base = 0.0;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (excluded_[i]) continue;
      const double kept = std::min(to_in[i], best1_[i]);
      base += kept;
      totals[nearest_index_[i]] += std::min(to_in[i], best2_[i]) - kept;
    }
    for (double& t : totals) t += base;
  }

  // Per center j: positions that stay non-centers when j is removed,
  // ordered by residual without j (farthest first, then id).
  void PrepareRemovalOrders() {
    removal_orders_.assign(centers_.size(), {});
    for (std::size_t j = 0; j < centers_.size(); ++j) {
      auto& order = removal_orders_[j];
      for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (is_center(ids_[i]) && ids_[i] != centers_[j]) continue;
        const double r = nearest_index_[i] == j ? best2_[i] : best1_[i];
        order.emplace_back(r, static_cast<PointId>(i));
      }
      std::sort(order.begin(), order.end(), FartherFirst());
    }
  }

  // Non-excluded residual mass of the m farthest non-centers after
  // replacing centers()[j] by the point at position `in_pos`. Needs
  // PrepareRemovalOrders(). Residuals never grow when a center is added,
  // so the scan stops once the removal-only residual drops below the
  // current m-th largest.
  double TopDiscardMass(std::size_t j, std::size_t in_pos,
                        const std::vector<double>& to_in, std::size_t m,
                        std::vector<std::pair<double, PointId>>& heap) const {
    heap.clear();
    if (m == 0) return 0.0;
    const FartherFirst farther;
    for (const auto& [r, pos_id] : removal_orders_[j]) {
      const auto pos = static_cast<std::size_t>(pos_id);
      if (pos == in_pos) continue;
      if (heap.size() == m && r < heap.front().first) break;
      const std::pair<double, PointId> cand(std::min(to_in[pos], r), pos_id);
      if (heap.size() < m) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), farther);
      } else if (farther(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), farther);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), farther);
      }
    }
    double mass = 0.0;
    for (const auto& [r, pos] : heap) {
      if (!excluded_[static_cast<std::size_t>(pos)]) mass += r;
    }
    return mass;
  }

  void SquaredDistancesTo(PointId u, std::vector<double>& out) const {
    out.resize(ids_.size());
    const auto q = ps_.row(u);
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      out[i] = squared_distance(ps_.row(ids_[i]), q);
    }
  }

  double ActiveCost() const {
    double total = 0.0;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!excluded_[i]) total += best1_[i];
    }
    return total;
  }

  // Top-m positions by residual among non-centers (centers given by
  // `center_of`), written to `marks` (set to 1). Returns the cost over
  // non-excluded, non-marked positions. `marks` is cleared on return
  // unless `keep` collects the chosen positions.
  template <typename ResidualFn, typename CenterFn>
  double CostAfterDiscard(std::size_t m, ResidualFn&& residual_of,
                          CenterFn&& center_of,
                          std::vector<std::pair<double, PointId>>& buf,
                          std::vector<char>& marks,
                          std::vector<PointId>* keep) const {
    buf.clear();
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!center_of(ids_[i])) buf.emplace_back(residual_of(i), ids_[i]);
    }
    const std::size_t take = std::min(m, buf.size());
    if (take > 0 && take < buf.size()) {
      std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(take - 1),
                       buf.end(), FartherFirst());
    }
    marks.assign(ids_.size(), 0);
    for (std::size_t t = 0; t < take; ++t) {
      marks[static_cast<std::size_t>(position(buf[t].second))] = 1;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!excluded_[i] && !marks[i]) total += residual_of(i);
    }
    if (keep) {
      keep->clear();
      for (std::size_t t = 0; t < take; ++t) keep->push_back(buf[t].second);
      std::sort(keep->begin(), keep->end());
    }
    return total;
  }

 private:
  const PointSet& ps_;
  std::vector<PointId> ids_;
  std::vector<char> excluded_;
  std::vector<double> best1_;
  std::vector<double> best2_;
  std::vector<PointId> nearest_;
  std::vector<std::uint32_t> nearest_index_;
  std::vector<std::int64_t> position_;
  // Positions are stored as PointId; ids_ is sorted, so position order is
  // id order and FartherFirst breaks ties the same way.
  std::vector<std::vector<std::pair<double, PointId>>> removal_orders_;
  std::vector<PointId> centers_;
  std::vector<char> is_center_;
};

// ConstrainedLS++ over the non-excluded part of `space`. `k` fixes the
// improvement threshold (1 - eps / k).
ConstrainedLsResult RunConstrainedLs(const PointSet& ps, SearchSpace& space,
                                     const HardZones& zones, double eps,
                                     std::size_t k, RandomSource& rng,
                                     std::size_t max_iters, bool audit) {
  ConstrainedLsResult result;
  const double factor = 1.0 - eps / static_cast<double>(k);
  double alpha = kInfinity;
  std::vector<double> to_p;
  std::vector<double> totals;
  while (true) {
    const double current = space.ActiveCost();
    if (!(alpha * factor > current)) break;
    if (result.iterations >= max_iters) {
      result.cap_hit = true;
      break;
    }
    alpha = current;
    ++result.iterations;
    if (!(current > 0.0)) break;  // nothing to sample: every point is served

    // D^2 sampling.
    const double target = rng.Uniform01() * current;
    double running = 0.0;
    std::size_t pick = space.size();
    std::size_t last_positive = space.size();
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (space.excluded(i) || !(space.residual(i) > 0.0)) continue;
      last_positive = i;
      running += space.residual(i);
      if (running > target) {
        pick = i;
        break;
      }
    }
    if (pick == space.size()) pick = last_positive;  // rounding at the tail
    const PointId p = space.id(pick);

    const auto& centers = space.centers();
    space.SquaredDistancesTo(p, to_p);
    space.SwapTotals(to_p, totals);
    double best_cost = kInfinity;
    PointId best_q = -1;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      if (!zones.swap_allowed(centers, centers[j], p)) continue;
      if (totals[j] < best_cost) {
        best_cost = totals[j];
        best_q = centers[j];
      }
    }
    if (best_q >= 0 && best_cost < current) {
      space.Assign(Swapped(centers, best_q, p));
      ++result.accepted_swaps;
      if (audit && !zones_hold(ps, zones, space.centers())) ++result.zone_violations;
    }
  }
  result.centers = space.centers();
  return result;
}

struct SwapChoice {
  double cost = kInfinity;
  PointId in = -1;
  PointId out = -1;
};

}  // namespace

double cost(const PointSet& ps, std::span<const PointId> centers,
            std::span<const PointId> excluded,
            std::span<const PointId> points) {
  if (centers.empty()) throw ConfigError("cost needs at least one center");
  const std::vector<PointId> skip = Sorted(excluded);
  double total = 0.0;
  for (PointId p : points) {
    if (std::binary_search(skip.begin(), skip.end(), p)) continue;
    double best = kInfinity;
    for (PointId c : centers) best = std::min(best, squared_distance(ps.row(p), ps.row(c)));
    total += best;
  }
  return total;
}

std::vector<PointId> farthest_m(const PointSet& ps,
                                std::span<const PointId> centers,
                                std::span<const PointId> base_excluded,
                                std::size_t m) {
  const std::vector<PointId> skip = Sorted(base_excluded);
  const std::vector<PointId> center_set = Sorted(centers);
  std::vector<std::pair<double, PointId>> residuals;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto p = static_cast<PointId>(i);
    if (std::binary_search(skip.begin(), skip.end(), p) ||
        std::binary_search(center_set.begin(), center_set.end(), p)) {
      continue;
    }
    double best = kInfinity;
    for (PointId c : centers) best = std::min(best, squared_distance(ps.row(p), ps.row(c)));
    residuals.emplace_back(best, p);
  }
  if (residuals.size() < m) {
    throw ConfigError("farthest_m: only " + std::to_string(residuals.size()) +
                      " candidates for m = " + std::to_string(m));
  }
  if (m > 0 && m < residuals.size()) {
    std::nth_element(residuals.begin(),
                     residuals.begin() + static_cast<std::ptrdiff_t>(m - 1),
                     residuals.end(), FartherFirst());
  }
  std::vector<PointId> out;
  out.reserve(m);
  for (std::size_t t = 0; t < m; ++t) out.push_back(residuals[t].second);
  std::sort(out.begin(), out.end());
  return out;
}

HardZones::HardZones(const PointSet& ps, const FairRadii& delta,
                     std::span<const PointId> anchors, double gamma)
    : anchors_(anchors.begin(), anchors.end()) {
  for (PointId a : anchors_) {
    const double r = (gamma + 2.0) * delta[a];
    radius_.push_back(r);
    std::vector<char> in(ps.size(), 0);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      in[i] = distance(ps.row(static_cast<PointId>(i)), ps.row(a)) <= r;
    }
    member_.push_back(std::move(in));
  }
}

bool HardZones::satisfied_by(std::span<const PointId> centers) const {
  for (std::size_t z = 0; z < size(); ++z) {
    if (std::none_of(centers.begin(), centers.end(),
                     [&](PointId c) { return contains(z, c); })) {
      return false;
    }
  }
  return true;
}

bool HardZones::swap_allowed(std::span<const PointId> centers, PointId out,
                             PointId in) const {
  for (std::size_t z = 0; z < size(); ++z) {
    if (!contains(z, out) || contains(z, in)) continue;
    const bool other = std::any_of(centers.begin(), centers.end(), [&](PointId c) {
      return c != out && contains(z, c);
    });
    if (!other) return false;
  }
  return true;
}

bool zones_hold(const PointSet& ps, const HardZones& zones,
                std::span<const PointId> centers) {
  for (std::size_t z = 0; z < zones.size(); ++z) {
    const auto a = ps.row(zones.anchors()[z]);
    const bool hit = std::any_of(centers.begin(), centers.end(), [&](PointId c) {
      return distance(ps.row(c), a) <= zones.radius(z);
    });
    if (!hit) return false;
  }
  return true;
}

ConstrainedLsResult constrained_ls_pp(const PointSet& ps,
                                      std::span<const PointId> points,
                                      const HardZones& zones,
                                      std::span<const PointId> centers,
                                      double eps, RandomSource& rng,
                                      std::size_t max_iters,
                                      bool audit_zones) {
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (centers.empty()) throw ConfigError("local search needs at least one center");
  if (!zones.satisfied_by(centers)) {
    throw ConfigError("initial centers leave a hard zone empty");
  }
  SearchSpace space(ps, Sorted(points));
  space.Assign(Sorted(centers));
  return RunConstrainedLs(ps, space, zones, eps, centers.size(), rng, max_iters,
                          audit_zones);
}

std::size_t iteration_cap(std::size_t k, double eps, std::size_t n,
                          double aspect) {
  const double a = std::max(1.0, aspect);
  const double bound = (static_cast<double>(k) / eps) *
                       std::log(static_cast<double>(n) * a * a);
  if (!(bound > 1.0)) return 1;
  if (bound > 1e15) return static_cast<std::size_t>(1e15);
  return static_cast<std::size_t>(std::ceil(bound));
}

SolveReport lsfo(const PointSet& ps, const FairRadii& delta,
                 const LsfoParams& params, RandomSource& rng) {
  const std::size_t n = ps.size();
  const std::size_t k = params.k;
  const std::size_t m = params.m;
  if (!(params.eps > 0.0)) throw ConfigError("eps must be positive");
  if (delta.size() != n) throw ConfigError("fair radii do not match the point set");

  SolveReport report;
  report.params = params;
  report.seed = rng.seed();

  const auto seeding_start = Clock::now();
  SeedResult seed = base_cent(ps, delta, k, m, params.gamma, params.discard_policy);
  report.anchors_s0 = seed.anchors_s0;
  report.fallback_count = seed.fallback_count;
  report.cover_overflow = seed.cover_overflow;
  try {
    report.aspect = aspect_ratio(ps).delta_max_over_min;
  } catch (const Error&) {
    report.aspect = 1.0;
  }
  report.iteration_limit = params.max_outer_iters.value_or(
      iteration_cap(k, params.eps, n, report.aspect));
  const std::size_t inner_cap = params.max_inner_iters.value_or(
      iteration_cap(k, params.eps, n, report.aspect));

  const std::vector<PointId> hard(
      seed.anchors_s0.begin(),
      seed.anchors_s0.begin() + static_cast<std::ptrdiff_t>(seed.hard_zone_count));
  report.zones = HardZones(ps, delta, hard, params.gamma);

  // Initial centers: hard anchors, padded uniformly from X \ (Z0 u S0).
  std::vector<PointId> centers = hard;
  if (seed.anchors_s0.size() < k) {
    std::vector<char> taken(n, 0);
    for (PointId z : seed.outliers_z0) taken[static_cast<std::size_t>(z)] = 1;
    for (PointId a : seed.anchors_s0) taken[static_cast<std::size_t>(a)] = 1;
    std::vector<PointId> pool;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) pool.push_back(static_cast<PointId>(i));
    }
    const std::size_t need = k - seed.anchors_s0.size();
    for (std::size_t idx : rng.SampleWithoutReplacement(pool.size(), need)) {
      centers.push_back(pool[idx]);
    }
    report.padded_centers = need;
  }
  std::sort(centers.begin(), centers.end());
  report.seeding_ms = MillisSince(seeding_start);

  const auto search_start = Clock::now();
  const std::vector<PointId>& z0 = seed.outliers_z0;
  std::vector<PointId> fair;
  {
    std::vector<char> in_z0(n, 0);
    for (PointId z : z0) in_z0[static_cast<std::size_t>(z)] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_z0[i]) fair.push_back(static_cast<PointId>(i));
    }
  }
  SearchSpace space(ps, fair);
  space.Assign(centers);
  std::vector<PointId> outliers = z0;  // running Z
  const double factor = 1.0 - params.eps / static_cast<double>(k);
  if (params.audit_zones && !zones_hold(ps, report.zones, space.centers())) {
    ++report.zone_violations;
  }

  bool full_stage3 = params.stage3 == Stage3Mode::kFull ||
                     (params.stage3 == Stage3Mode::kAuto && n <= kStage3FullLimit);

  std::vector<std::pair<double, PointId>> buf;
  std::vector<char> marks;
  double alpha = kInfinity;
  while (true) {
    const double current = space.ActiveCost();
    if (!(alpha * factor > current)) break;
    if (report.iterations.size() >= report.iteration_limit) {
      report.cap_hit = true;
      break;
    }
    alpha = current;
    const auto iter_start = Clock::now();
    IterationRecord rec;
    rec.cost_before = current;

    // Stage 1: constrained local search on X_fair \ Z.
    ConstrainedLsResult inner =
        RunConstrainedLs(ps, space, report.zones, params.eps, k, rng, inner_cap,
                         params.audit_zones);
    rec.inner_iterations = inner.iterations;
    report.zone_violations += inner.zone_violations;
    const std::vector<PointId> s = space.centers();
    const double stage1 = space.ActiveCost();
    rec.stage1_cost = stage1;

    // Stage 2: discard the current outliers.
    std::vector<PointId> stage2_discard;
    const double stage2 = space.CostAfterDiscard(
        m, [&](std::size_t i) { return space.residual(i); },
        [&](PointId id) { return space.is_center(id); }, buf, marks,
        &stage2_discard);
    rec.stage2_cost = stage2;
    double best_cost = stage1;
    std::string best_move = "none";
    if (factor * stage1 > stage2) {
      best_cost = stage2;
      best_move = "discard";
    }

    // Stage 3: every zone-respecting swap, each followed by a discard.
    std::vector<PointId> candidates;
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (!space.excluded(i) && !space.is_center(space.id(i))) {
        candidates.push_back(space.id(i));
      }
    }
    if (!full_stage3 && candidates.size() > params.stage3_budget) {
      std::vector<std::size_t> picked =
          rng.SampleWithoutReplacement(candidates.size(), params.stage3_budget);
      std::sort(picked.begin(), picked.end());
      std::vector<PointId> sampled;
      for (std::size_t idx : picked) sampled.push_back(candidates[idx]);
      candidates = std::move(sampled);
    }
    space.PrepareRemovalOrders();
    std::vector<SwapChoice> per_candidate(candidates.size());
    ParallelFor(candidates.size(), [&](std::size_t c) {
      thread_local std::vector<double> to_u;
      thread_local std::vector<double> totals;
      thread_local std::vector<std::pair<double, PointId>> heap;
      const PointId u = candidates[c];
      const auto u_pos = static_cast<std::size_t>(space.position(u));
      space.SquaredDistancesTo(u, to_u);
      space.SwapTotals(to_u, totals);
      SwapChoice& choice = per_candidate[c];
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (!report.zones.swap_allowed(s, s[j], u)) continue;
        const double total =
            totals[j] - space.TopDiscardMass(j, u_pos, to_u, m, heap);
        if (total < choice.cost) choice = SwapChoice{total, u, s[j]};
      }
    }, 8);
    SwapChoice best_swap;
    for (const SwapChoice& choice : per_candidate) {
      if (choice.cost < best_swap.cost) best_swap = choice;
    }
    rec.stage3_cost = best_swap.cost;
    bool swap_wins = false;
    if (best_swap.in >= 0 && best_swap.cost < best_cost) {
      best_cost = best_swap.cost;
      swap_wins = true;
      best_move = "swap " + std::to_string(best_swap.in) + " " +
                  std::to_string(best_swap.out);
    }

    if (factor * stage1 > best_cost) {
      rec.accepted = true;
      rec.move = best_move;
      if (swap_wins) {
        std::vector<PointId> to_u_discard;
        std::vector<double> to_u;
        space.SquaredDistancesTo(best_swap.in, to_u);
        space.CostAfterDiscard(
            m,
            [&](std::size_t i) {
              return space.SwappedResidual(i, best_swap.out, to_u[i]);
            },
            [&](PointId id) {
              return id == best_swap.in ||
                     (id != best_swap.out && space.is_center(id));
            },
            buf, marks, &to_u_discard);
        outliers = Union(outliers, to_u_discard);
        space.Assign(Swapped(s, best_swap.out, best_swap.in));
      } else {
        outliers = Union(outliers, stage2_discard);
      }
      space.SetExcluded(outliers);
      if (params.audit_zones && !zones_hold(ps, report.zones, space.centers())) {
        ++report.zone_violations;
      }
    } else {
      rec.move = "none";
    }
    rec.cost_after = space.ActiveCost();
    rec.z_size = outliers.size();
    rec.ms = MillisSince(iter_start);
    report.iterations.push_back(std::move(rec));
  }
  report.search_ms = MillisSince(search_start);

  report.state.centers = space.centers();
  report.state.outliers = outliers;
  report.state.fairness_outliers = z0;
  report.cost = cost(ps, report.state.centers, outliers, fair);
  double rho = 0.0;
  std::vector<char> in_z(n, 0);
  for (PointId z : outliers) in_z[static_cast<std::size_t>(z)] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_z[i]) continue;
    const auto p = static_cast<PointId>(i);
    const double d = dist_to_set(ps, p, report.state.centers);
    if (d == 0.0) continue;
    rho = std::max(rho, delta[p] > 0.0 ? d / delta[p] : kInfinity);
  }
  report.rho = rho;
  return report;
}

LocalOptimalityReport local_optimality_check(
    const PointSet& ps, const ClusteringState& state, const HardZones& zones,
    std::size_t m, double eps, std::size_t k,
    std::optional<std::size_t> sampled_pairs, RandomSource* rng,
    double relative_slack) {
  if (sampled_pairs && rng == nullptr) {
    throw ConfigError("sampled local-optimality check needs a random source");
  }
  const std::size_t n = ps.size();
  const std::vector<PointId> z0 = Sorted(state.fairness_outliers);
  const std::vector<PointId> z = Sorted(state.outliers);
  const std::vector<PointId> s = Sorted(state.centers);
  std::vector<PointId> fair;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = static_cast<PointId>(i);
    if (!std::binary_search(z0.begin(), z0.end(), p)) fair.push_back(p);
  }
  auto discard_for = [&](const std::vector<PointId>& centers) {
    const std::size_t available = fair.size() - centers.size();
    return farthest_m(ps, centers, z0, std::min(m, available));
  };

  LocalOptimalityReport out;
  const double base = cost(ps, s, z, fair);
  const double allowed = -(eps / static_cast<double>(k)) * base -
                         relative_slack * base;

  out.discard_gain = cost(ps, s, Union(z, discard_for(s)), fair) - base;
  out.condition1 = out.discard_gain >= allowed;

  std::vector<PointId> us;
  for (PointId p : fair) {
    if (!std::binary_search(z.begin(), z.end(), p) &&
        !std::binary_search(s.begin(), s.end(), p)) {
      us.push_back(p);
    }
  }
  auto check_pair = [&](PointId u, PointId v) {
    std::vector<PointId> next = Swapped(s, v, u);
    if (!zones_hold(ps, zones, next)) return true;
    ++out.pairs_checked;
    const double c = cost(ps, next, Union(z, discard_for(next)), fair);
    if (c - base >= allowed) return true;
    out.violating_pair = std::make_pair(u, v);
    out.violating_cost = c;
    return false;
  };

  out.condition2 = true;
  const std::size_t total = us.size() * s.size();
  if (!sampled_pairs || *sampled_pairs >= total) {
    for (PointId u : us) {
      for (PointId v : s) {
        if (!check_pair(u, v)) {
          out.condition2 = false;
          return out;
        }
      }
    }
  } else {
    for (std::size_t idx : rng->SampleWithoutReplacement(total, *sampled_pairs)) {
      if (!check_pair(us[idx / s.size()], s[idx % s.size()])) {
        out.condition2 = false;
        return out;
      }
    }
  }
  return out;
}

nlohmann::json to_json(const SolveReport& report, bool include_timings) {
  auto number = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::json iterations = nlohmann::json::array();
  for (const auto& it : report.iterations) {
    nlohmann::json row = {
        {"stage_costs",
         {number(it.stage1_cost), number(it.stage2_cost), number(it.stage3_cost)}},
        {"cost_before", number(it.cost_before)},
        {"cost_after", number(it.cost_after)},
        {"accepted", it.accepted},
        {"move", it.move},
        {"z_size", it.z_size},
        {"inner_iterations", it.inner_iterations}};
    if (include_timings) row["ms"] = it.ms;
    iterations.push_back(std::move(row));
  }
  const char* stage3 = report.params.stage3 == Stage3Mode::kFull ? "full"
                       : report.params.stage3 == Stage3Mode::kSampled ? "sampled"
                                                                     : "auto";
  nlohmann::json out = {
      {"k", report.params.k},
      {"m", report.params.m},
      {"gamma", report.params.gamma},
      {"eps", report.params.eps},
      {"seed", report.seed},
      {"cost", number(report.cost)},
      {"rho", number(report.rho)},
      {"outliers", report.state.outliers},
      {"fairness_outliers", report.state.fairness_outliers},
      {"centers", report.state.centers},
      {"anchors", report.anchors_s0},
      {"hard_zones", report.zones.anchors()},
      {"padded_centers", report.padded_centers},
      {"iterations", iterations},
      {"iteration_limit", report.iteration_limit},
      {"fallback_count", report.fallback_count},
      {"cover_overflow", report.cover_overflow},
      {"cap_hit", report.cap_hit},
      {"zone_violations", report.zone_violations},
      {"aspect_ratio", number(report.aspect)},
      {"stage3_mode", stage3},
      {"stage3_budget", report.params.stage3_budget},
      {"discard_policy", report.params.discard_policy == DiscardPolicy::kLargestRadius
                             ? "largest_radius"
                             : "last_covered"}};
  if (include_timings) {
    out["seeding_ms"] = report.seeding_ms;
    out["search_ms"] = report.search_ms;
  }
  return out;
}

}  // namespace fairkm
