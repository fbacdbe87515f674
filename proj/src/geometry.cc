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

#include "fairkm/geometry.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fairkm/error.h"
#include "fairkm/parallel.h"

namespace fairkm {

double distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw ConfigError("dimension mismatch: " + std::to_string(p.size()) +
                      " vs " + std::to_string(q.size()));
  }
  return std::sqrt(squared_distance(p, q));
}

double dist_to_set(const PointSet& ps, std::span<const double> p,
                   std::span<const PointId> centers) {
  double best = kInfinity;
  for (PointId c : centers) best = std::min(best, squared_distance(p, ps.row(c)));
  return std::sqrt(best);
}

double dist_to_set(const PointSet& ps, PointId p,
                   std::span<const PointId> centers) {
  return dist_to_set(ps, ps.row(p), centers);
}

FairRadii fair_radii(const PointSet& ps, std::size_t k) {
  const std::size_t n = ps.size();
  if (k < 1 || k > n) {
    throw ConfigError("k = " + std::to_string(k) + " outside [1, " +
                      std::to_string(n) + "]");
  }
  FairRadii out;
  out.neighbor_count = (n + k - 1) / k;
  out.delta.assign(n, 0.0);
  if (n == 1) return out;
  // The rank among the n - 1 other points, zero-based.
  const std::size_t rank = std::min(out.neighbor_count, n - 1) - 1;
  ParallelFor(n, [&](std::size_t i) {
    std::vector<double> dist;
    dist.reserve(n - 1);
    const auto p = ps.row(static_cast<PointId>(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dist.push_back(squared_distance(p, ps.row(static_cast<PointId>(j))));
    }
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(rank),
                     dist.end());
    out.delta[i] = std::sqrt(dist[rank]);
  }, 16);
  return out;
}

AspectRatio aspect_ratio(const PointSet& ps) {
  const std::size_t n = ps.size();
  if (n < 2) throw DataError("aspect ratio needs at least two points");
  AspectRatio out;
  std::vector<double> row_min(n, kInfinity);
  std::vector<double> row_max(n, 0.0);
  const bool exact = n <= kExactAspectLimit;
  // Nearest distinct neighbor for every point; farthest too when exact.
  ParallelFor(n, [&](std::size_t i) {
    const auto p = ps.row(static_cast<PointId>(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double s = squared_distance(p, ps.row(static_cast<PointId>(j)));
      if (s > 0.0) row_min[i] = std::min(row_min[i], s);
      if (exact) row_max[i] = std::max(row_max[i], s);
    }
  }, 16);
  double min_sq = kInfinity;
  double max_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    min_sq = std::min(min_sq, row_min[i]);
    max_sq = std::max(max_sq, row_max[i]);
  }
  if (!exact) {
    // Points extreme along some axis, each swept against every point.
    std::vector<PointId> extremes;
    for (std::size_t j = 0; j < ps.dim(); ++j) {
      PointId lo = 0, hi = 0;
      for (std::size_t i = 1; i < n; ++i) {
        const auto id = static_cast<PointId>(i);
        if (ps.at(id, j) < ps.at(lo, j)) lo = id;
        if (ps.at(id, j) > ps.at(hi, j)) hi = id;
      }
      extremes.push_back(lo);
      extremes.push_back(hi);
    }
    for (PointId e : extremes) {
      for (std::size_t i = 0; i < n; ++i) {
        max_sq = std::max(max_sq, squared_distance(ps.row(e), ps.row(static_cast<PointId>(i))));
      }
    }
    out.approximate = true;
  }
  if (!std::isfinite(min_sq)) {
    throw DataError("all points are identical; aspect ratio undefined");
  }
  out.min_pairwise = std::sqrt(min_sq);
  out.max_pairwise = std::sqrt(max_sq);
  out.delta_max_over_min = out.max_pairwise / out.min_pairwise;
  return out;
}

void write_radii_csv(const FairRadii& radii, std::uint64_t dataset_hash,
                     std::size_t k, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(dataset_hash));
  out << "# dataset_hash=" << hash << " k=" << k
      << " neighbor_count=" << radii.neighbor_count << '\n';
  out << "id,delta\n";
  char buf[64];
  for (std::size_t i = 0; i < radii.delta.size(); ++i) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), radii.delta[i]);
    out << i << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
  }
  if (!out) throw DataError("write failure on '" + path + "'");
}

std::optional<FairRadii> read_radii_csv(const std::string& path,
                                        std::uint64_t dataset_hash,
                                        std::size_t k) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  unsigned long long hash = 0;
  std::size_t file_k = 0, neighbors = 0;
  if (std::sscanf(line.c_str(), "# dataset_hash=%llx k=%zu neighbor_count=%zu",
                  &hash, &file_k, &neighbors) != 3) {
    return std::nullopt;
  }
  if (hash != dataset_hash || file_k != k) return std::nullopt;
  if (!std::getline(in, line) || line != "id,delta") return std::nullopt;
  FairRadii radii;
  radii.neighbor_count = neighbors;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError("malformed radii cache '" + path + "'");
    std::size_t id = 0;
    double value = 0.0;
    std::from_chars(line.data(), line.data() + comma, id);
    const auto [ptr, ec] =
        std::from_chars(line.data() + comma + 1, line.data() + line.size(), value);
    if (ec != std::errc() || id != radii.delta.size()) {
      throw DataError("malformed radii cache '" + path + "'");
    }
    radii.delta.push_back(value);
  }
  return radii;
}

}  // namespace fairkm
