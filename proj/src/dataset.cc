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

#include "fairkm/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fairkm/error.h"

namespace fairkm {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(Trim(line.substr(start)));
      return out;
    }
    out.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::optional<double> ParseNumber(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

PointSet::PointSet(std::size_t n, std::size_t d, std::vector<double> values,
                   std::vector<std::string> column_names,
                   std::vector<PointId> injected_outliers)
    : n_(n),
      d_(d),
      values_(std::move(values)),
      columns_(std::move(column_names)),
      injected_(std::move(injected_outliers)) {
  if (n_ == 0 || d_ == 0) throw DataError("point set must have n >= 1, d >= 1");
  if (values_.size() != n_ * d_) {
    throw DataError("point matrix has " + std::to_string(values_.size()) +
                    " values, expected " + std::to_string(n_ * d_));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("non-finite value at row " + std::to_string(i / d_) +
                      ", column " + std::to_string(i % d_));
    }
  }
  if (columns_.empty()) {
    for (std::size_t j = 0; j < d_; ++j) columns_.push_back("x" + std::to_string(j));
  } else if (columns_.size() != d_) {
    throw DataError("column name count does not match dimension");
  }
  std::sort(injected_.begin(), injected_.end());
  injected_.erase(std::unique(injected_.begin(), injected_.end()),
                  injected_.end());
  for (PointId id : injected_) {
    if (id < 0 || static_cast<std::size_t>(id) >= n_) {
      throw DataError("injected outlier id out of range");
    }
  }
}

bool PointSet::is_injected(PointId id) const {
  return std::binary_search(injected_.begin(), injected_.end(), id);
}

PointSet load_csv(const std::string& path,
                  const std::optional<std::vector<std::string>>& columns) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::vector<std::string> lines;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    lines.push_back(line);
    line_numbers.push_back(line_no);
  }
  if (in.bad()) throw DataError("read failure on '" + path + "'");
  if (lines.empty()) throw DataError("'" + path + "' is empty");

  std::vector<std::string> header;
  std::size_t first_data = 0;
  {
    const auto fields = SplitFields(lines[0]);
    const bool any_numeric = std::any_of(
        fields.begin(), fields.end(),
        [](std::string_view f) { return ParseNumber(f).has_value(); });
    if (!any_numeric) {
      for (auto f : fields) header.emplace_back(f);
      first_data = 1;
    }
  }
  if (first_data >= lines.size()) {
    throw DataError("'" + path + "' has a header but no data rows");
  }

  std::vector<std::vector<std::string_view>> rows;
  rows.reserve(lines.size() - first_data);
  const std::size_t width = SplitFields(lines[first_data]).size();
  if (!header.empty() && header.size() != width) {
    throw DataError("header of '" + path + "' has " +
                    std::to_string(header.size()) + " fields, rows have " +
                    std::to_string(width));
  }
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    rows.push_back(SplitFields(lines[i]));
    if (rows.back().size() != width) {
      throw DataError("line " + std::to_string(line_numbers[i]) + " has " +
                      std::to_string(rows.back().size()) +
                      " fields, expected " + std::to_string(width));
    }
  }
  auto column_label = [&](std::size_t c) {
    return header.empty() ? std::to_string(c) : "'" + header[c] + "'";
  };

  std::vector<std::size_t> selected;
  if (columns) {
    for (const std::string& name : *columns) {
      auto it = std::find(header.begin(), header.end(), name);
      if (it != header.end()) {
        selected.push_back(static_cast<std::size_t>(it - header.begin()));
        continue;
      }
      std::size_t index = 0;
      const auto [ptr, ec] =
          std::from_chars(name.data(), name.data() + name.size(), index);
      if (ec != std::errc() || ptr != name.data() + name.size() ||
          index >= width) {
        throw DataError("unknown column '" + name + "' in '" + path + "'");
      }
      selected.push_back(index);
    }
    if (selected.empty()) throw DataError("empty column selection");
  } else {
    for (std::size_t c = 0; c < width; ++c) {
      const bool numeric = std::all_of(rows.begin(), rows.end(), [&](const auto& r) {
        return ParseNumber(r[c]).has_value();
      });
      if (numeric) selected.push_back(c);
    }
    if (selected.empty()) {
      throw DataError("'" + path + "' has no numeric columns");
    }
  }

  std::vector<double> values;
  values.reserve(rows.size() * selected.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c : selected) {
      const auto v = ParseNumber(rows[r][c]);
      if (!v) {
        throw DataError("row " + std::to_string(r) + " (line " +
                        std::to_string(line_numbers[r + first_data]) +
                        "), column " + column_label(c) +
                        ": non-numeric value '" + std::string(rows[r][c]) +
                        "'");
      }
      values.push_back(*v);
    }
  }
  std::vector<std::string> names;
  for (std::size_t c : selected) {
    names.push_back(header.empty() ? "x" + std::to_string(c) : header[c]);
  }
  return PointSet(rows.size(), selected.size(), std::move(values),
                  std::move(names));
}

void write_csv(const PointSet& ps, const std::string& path,
               bool with_injected_column) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  const auto& names = ps.column_names();
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out << ',';
    out << names[j];
  }
  if (with_injected_column) out << ",injected_outlier";
  out << '\n';
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto id = static_cast<PointId>(i);
    const auto row = ps.row(id);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << FormatDouble(row[j]);
    }
    if (with_injected_column) out << ',' << (ps.is_injected(id) ? 1 : 0);
    out << '\n';
  }
  if (!out) throw DataError("write failure on '" + path + "'");
}

PointSet subsample(const PointSet& ps, std::size_t n_target,
                   RandomSource& rng) {
  if (n_target < 1 || n_target > ps.size()) {
    throw ConfigError("subsample size " + std::to_string(n_target) +
                      " outside [1, " + std::to_string(ps.size()) + "]");
  }
  std::vector<std::size_t> picked =
      rng.SampleWithoutReplacement(ps.size(), n_target);
  std::sort(picked.begin(), picked.end());
  std::vector<double> values;
  values.reserve(n_target * ps.dim());
  std::vector<PointId> injected;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    const auto src = static_cast<PointId>(picked[i]);
    const auto row = ps.row(src);
    values.insert(values.end(), row.begin(), row.end());
    if (ps.is_injected(src)) injected.push_back(static_cast<PointId>(i));
  }
  return PointSet(n_target, ps.dim(), std::move(values), ps.column_names(),
                  std::move(injected));
}

std::size_t injected_count(std::size_t n, double fraction) {
  // nearbyint honours the default round-to-nearest-even mode.
  return static_cast<std::size_t>(
      std::nearbyint(fraction * static_cast<double>(n)));
}

PointSet inject_outliers(const PointSet& ps, double fraction,
                         RandomSource& rng) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("outlier fraction must lie in (0, 1]");
  }
  const std::size_t count = injected_count(ps.size(), fraction);
  if (count < 1) {
    throw ConfigError("outlier fraction selects no rows out of " +
                      std::to_string(ps.size()));
  }
  const std::size_t d = ps.dim();
  std::vector<double> col_max(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto row = ps.row(static_cast<PointId>(i));
    for (std::size_t j = 0; j < d; ++j) col_max[j] = std::max(col_max[j], row[j]);
  }

  std::vector<std::size_t> picked = rng.SampleWithoutReplacement(ps.size(), count);
  std::sort(picked.begin(), picked.end());
  std::vector<double> values = ps.values();
  std::vector<PointId> injected = ps.injected_outliers();
  for (std::size_t r : picked) {
    for (std::size_t j = 0; j < d; ++j) {
      values[r * d + j] += rng.Uniform01() * col_max[j];
    }
    injected.push_back(static_cast<PointId>(r));
  }
  return PointSet(ps.size(), d, std::move(values), ps.column_names(),
                  std::move(injected));
}

PointSet min_max_scale(const PointSet& ps) {
  const std::size_t d = ps.dim();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto row = ps.row(static_cast<PointId>(i));
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], row[j]);
      hi[j] = std::max(hi[j], row[j]);
    }
  }
  std::vector<double> values = ps.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t j = i % d;
    const double width = hi[j] - lo[j];
    values[i] = width > 0.0 ? (values[i] - lo[j]) / width : 0.0;
  }
  return PointSet(ps.size(), d, std::move(values), ps.column_names(),
                  ps.injected_outliers());
}

std::uint64_t dataset_hash(const PointSet& ps) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t shape[2] = {ps.size(), ps.dim()};
  mix(shape, sizeof(shape));
  mix(ps.values().data(), ps.values().size() * sizeof(double));
  return h;
}

}  // namespace fairkm
