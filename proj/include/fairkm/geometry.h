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

// Euclidean distances, fair radii and the instance aspect ratio.

#ifndef FAIRKM_GEOMETRY_H_
#define FAIRKM_GEOMETRY_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairkm/dataset.h"

namespace fairkm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Throws ConfigError on dimension mismatch.
double distance(std::span<const double> p, std::span<const double> q);

// Squared distance without the dimension check; hot loops use this.
inline double squared_distance(std::span<const double> p,
                               std::span<const double> q) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double diff = p[j] - q[j];
    s += diff * diff;
  }
  return s;
}

// Distance from p to the closest center; +infinity when there is none.
double dist_to_set(const PointSet& ps, std::span<const double> p,
                   std::span<const PointId> centers);
double dist_to_set(const PointSet& ps, PointId p,
                   std::span<const PointId> centers);

// Per-point fair radius: distance to the neighbor_count-th nearest other
// point, neighbor_count = ceil(n / k).
struct FairRadii {
  std::vector<double> delta;
  std::size_t neighbor_count = 0;

  double operator[](PointId id) const {
    return delta[static_cast<std::size_t>(id)];
  }
  std::size_t size() const { return delta.size(); }
};

// Brute force over all pairs, parallel over points. When ceil(n / k)
// exceeds the n - 1 available neighbors the farthest point is used.
FairRadii fair_radii(const PointSet& ps, std::size_t k);

struct AspectRatio {
  double delta_max_over_min = 1.0;
  double min_pairwise = 0.0;
  double max_pairwise = 0.0;
  bool approximate = false;
};

// Exact over all distinct pairs up to kExactAspectLimit points; beyond that
// the maximum comes from an extreme-point sweep and is flagged approximate.
// Throws DataError when fewer than two distinct points exist.
inline constexpr std::size_t kExactAspectLimit = 20000;
AspectRatio aspect_ratio(const PointSet& ps);

// Two-column (id, delta) cache keyed by dataset hash and k.
void write_radii_csv(const FairRadii& radii, std::uint64_t dataset_hash,
                     std::size_t k, const std::string& path);
// Returns nullopt when the file is missing or keyed to another (hash, k).
std::optional<FairRadii> read_radii_csv(const std::string& path,
                                        std::uint64_t dataset_hash,
                                        std::size_t k);

}  // namespace fairkm

#endif  // FAIRKM_GEOMETRY_H_
