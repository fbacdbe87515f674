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

// Point sets: CSV ingestion, subsampling and synthetic outlier injection.

#ifndef FAIRKM_DATASET_H_
#define FAIRKM_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairkm/random_source.h"

namespace fairkm {

using PointId = std::int32_t;

// Immutable n x d matrix of finite reals. Row i has id i.
class PointSet {
 public:
  // Throws DataError if the shape is inconsistent, n or d is zero, any value
  // is non-finite, or an injected id is out of range.
  PointSet(std::size_t n, std::size_t d, std::vector<double> values,
           std::vector<std::string> column_names = {},
           std::vector<PointId> injected_outliers = {});

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }

  std::span<const double> row(PointId id) const {
    return {values_.data() + static_cast<std::size_t>(id) * d_, d_};
  }
  double at(PointId id, std::size_t col) const {
    return values_[static_cast<std::size_t>(id) * d_ + col];
  }
  const std::vector<double>& values() const { return values_; }

  // Names are synthesized ("x0", "x1", ...) when none were given.
  const std::vector<std::string>& column_names() const { return columns_; }

  // Sorted ascending.
  const std::vector<PointId>& injected_outliers() const { return injected_; }
  bool is_injected(PointId id) const;

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<double> values_;
  std::vector<std::string> columns_;
  std::vector<PointId> injected_;
};

// Loads a comma-delimited file. A first line with no numeric field is a
// header. Without `columns`, every column that parses as a number on all
// rows is kept and the rest are dropped; with `columns` (header names or
// zero-based indices), exactly those are kept and any non-numeric value is
// an error naming the row and column.
PointSet load_csv(const std::string& path,
                  const std::optional<std::vector<std::string>>& columns =
                      std::nullopt);

// Writes the matrix with shortest round-trip formatting, plus a trailing
// 0/1 `injected_outlier` column when requested.
void write_csv(const PointSet& ps, const std::string& path,
               bool with_injected_column = true);

// Uniform sample without replacement. Rows keep their original relative
// order and are renumbered 0..n_target-1.
PointSet subsample(const PointSet& ps, std::size_t n_target,
                   RandomSource& rng);

// Number of rows inject_outliers perturbs: fraction * n rounded half to even.
std::size_t injected_count(std::size_t n, double fraction);

// Picks injected_count(n, fraction) rows uniformly and adds an independent
// Uniform(0, col_max) draw to each of their features, where col_max is the
// column maximum before injection. Marks the rows as injected.
PointSet inject_outliers(const PointSet& ps, double fraction,
                         RandomSource& rng);

// Per-column min-max scaling to [0, 1]; constant columns map to 0.
PointSet min_max_scale(const PointSet& ps);

// FNV-1a over shape and raw bytes of the values; keys on-disk caches.
std::uint64_t dataset_hash(const PointSet& ps);

}  // namespace fairkm

#endif  // FAIRKM_DATASET_H_
