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

#include <bit>
#include <cmath>
#include <functional>
#include <filesystem>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fairkm/error.h"
#include "fairkm/random_source.h"
#include "test_util.h"

namespace fairkm {
namespace {

using testing::ReadFile;
using testing::TempPath;
using testing::WriteFile;

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no fairkm::Error thrown";
  return ErrorKind::kInvariant;
}

std::string MessageOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

PointSet Grid(std::size_t n, std::size_t d) {
  std::vector<double> v(n * d);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i % 97);
  return PointSet(n, d, v);
}

// PointSet

TEST(PointSetTest, RejectsBadShapes) {
  EXPECT_EQ(KindOf([] { PointSet(0, 1, {}); }), ErrorKind::kData);
  EXPECT_EQ(KindOf([] { PointSet(2, 2, {1, 2, 3}); }), ErrorKind::kData);
  EXPECT_EQ(KindOf([] { PointSet(1, 1, {std::nan("")}); }), ErrorKind::kData);
  EXPECT_EQ(KindOf([] {
              PointSet(1, 1, {std::numeric_limits<double>::infinity()});
            }),
            ErrorKind::kData);
  EXPECT_EQ(KindOf([] { PointSet(2, 1, {1, 2}, {}, {2}); }), ErrorKind::kData);
}

TEST(PointSetTest, SynthesizesColumnNames) {
  const PointSet ps(1, 3, {1, 2, 3});
  EXPECT_EQ(ps.column_names(), (std::vector<std::string>{"x0", "x1", "x2"}));
  EXPECT_EQ(ps.at(0, 2), 3.0);
}

// load_csv

TEST(LoadCsvTest, HeaderedThreeRows) {
  const std::string path = TempPath("three.csv");
  WriteFile(path, "age,hours\n25,40\n38,50\n28,40\n");
  const PointSet ps = load_csv(path);
  EXPECT_EQ(ps.size(), 3u);
  EXPECT_EQ(ps.dim(), 2u);
  EXPECT_EQ(ps.column_names(), (std::vector<std::string>{"age", "hours"}));
  EXPECT_EQ(ps.at(1, 0), 38.0);
  EXPECT_TRUE(ps.injected_outliers().empty());
}

TEST(LoadCsvTest, HeaderlessFile) {
  const std::string path = TempPath("headerless.csv");
  WriteFile(path, "1,2\n3,4\n");
  const PointSet ps = load_csv(path);
  EXPECT_EQ(ps.size(), 2u);
  EXPECT_EQ(ps.at(0, 0), 1.0);
}

TEST(LoadCsvTest, DropsNonNumericColumnsWithoutSelector) {
  const std::string path = TempPath("mixed.csv");
  WriteFile(path, "age,job,hours\n25, Private ,40\n38,\"Self\",50\r\n\n");
  const PointSet ps = load_csv(path);
  EXPECT_EQ(ps.dim(), 2u);
  EXPECT_EQ(ps.column_names(), (std::vector<std::string>{"age", "hours"}));
  EXPECT_EQ(ps.at(1, 1), 50.0);
}

TEST(LoadCsvTest, SelectorByNameAndIndex) {
  const std::string path = TempPath("select.csv");
  WriteFile(path, "a,b,c\n1,2,3\n4,5,6\n");
  const PointSet by_name = load_csv(path, std::vector<std::string>{"c", "a"});
  EXPECT_EQ(by_name.values(), (std::vector<double>{3, 1, 6, 4}));
  const PointSet by_index = load_csv(path, std::vector<std::string>{"1"});
  EXPECT_EQ(by_index.values(), (std::vector<double>{2, 5}));
  EXPECT_EQ(KindOf([&] { load_csv(path, std::vector<std::string>{"zz"}); }),
            ErrorKind::kData);
}

TEST(LoadCsvTest, NonNumericSelectedValueNamesRow) {
  const std::string path = TempPath("bad_row.csv");
  WriteFile(path, "x,y\n1,2\na,b\n");
  const std::string msg =
      MessageOf([&] { load_csv(path, std::vector<std::string>{"x", "y"}); });
  EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("'x'"), std::string::npos) << msg;
}

TEST(LoadCsvTest, ErrorCases) {
  EXPECT_EQ(KindOf([] { load_csv(TempPath("does_not_exist.csv")); }),
            ErrorKind::kData);
  const std::string empty = TempPath("empty.csv");
  WriteFile(empty, "");
  EXPECT_EQ(KindOf([&] { load_csv(empty); }), ErrorKind::kData);
  const std::string ragged = TempPath("ragged.csv");
  WriteFile(ragged, "1,2\n3\n");
  EXPECT_EQ(KindOf([&] { load_csv(ragged); }), ErrorKind::kData);
  const std::string header_only = TempPath("header_only.csv");
  WriteFile(header_only, "a,b\n");
  EXPECT_EQ(KindOf([&] { load_csv(header_only); }), ErrorKind::kData);
  const std::string text_only = TempPath("text_only.csv");
  WriteFile(text_only, "a,b\nx,y\n");
  EXPECT_EQ(KindOf([&] { load_csv(text_only); }), ErrorKind::kData);
}

TEST(LoadCsvTest, WriteThenLoadIsBitExact) {
  RandomSource rng(11);
  std::vector<double> v(60);
  for (double& x : v) x = (rng.Uniform01() - 0.5) * std::pow(10.0, rng.UniformIndex(30) - 15.0);
  v[0] = 0.1;
  v[1] = 1.0 / 3.0;
  v[2] = -0.0;
  v[3] = 1e-310;
  const PointSet ps(20, 3, v, {"a", "b", "c"}, {4, 7});
  const std::string path = TempPath("roundtrip.csv");
  write_csv(ps, path);
  const PointSet back = load_csv(path, std::vector<std::string>{"a", "b", "c"});
  ASSERT_EQ(back.values().size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back.values()[i] + 0.0),
              std::bit_cast<std::uint64_t>(v[i] + 0.0))
        << i;
  }
  const std::string text = ReadFile(path);
  EXPECT_EQ(text.substr(0, text.find('\n')), "a,b,c,injected_outlier");
  const PointSet flags = load_csv(path, std::vector<std::string>{"injected_outlier"});
  EXPECT_EQ(flags.at(4, 0), 1.0);
  EXPECT_EQ(flags.at(5, 0), 0.0);
}

TEST(LoadCsvTest, AdultCopyIfPresent) {
  const std::string path = std::string(FAIRKM_DATA_DIR) + "/adult.csv";
  if (!std::filesystem::exists(path)) GTEST_SKIP() << "no local Adult copy";
  const PointSet ps = load_csv(path);
  EXPECT_EQ(ps.size(), 48842u);
  EXPECT_EQ(ps.dim(), 6u);
}

// subsample

TEST(SubsampleTest, FullSampleIsIdentity) {
  const PointSet ps = Grid(10, 2);
  RandomSource rng(3);
  const PointSet out = subsample(ps, 10, rng);
  EXPECT_EQ(out.values(), ps.values());
}

TEST(SubsampleTest, DeterministicAndOrderPreserving) {
  const PointSet ps = testing::Line({0, 1, 2, 3, 4});
  RandomSource a(5), b(5);
  const PointSet x = subsample(ps, 2, a);
  const PointSet y = subsample(ps, 2, b);
  EXPECT_EQ(x.values(), y.values());
  EXPECT_EQ(x.size(), 2u);
  EXPECT_LT(x.at(0, 0), x.at(1, 0));
}

TEST(SubsampleTest, SizeAndDistinctRows) {
  const PointSet ps = testing::Line([] {
    std::vector<double> v(40000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    return v;
  }());
  RandomSource rng(1);
  const PointSet out = subsample(ps, 4000, rng);
  EXPECT_EQ(out.size(), 4000u);
  std::set<double> seen(out.values().begin(), out.values().end());
  EXPECT_EQ(seen.size(), 4000u);
}

TEST(SubsampleTest, CarriesInjectedMarks) {
  const PointSet ps(4, 1, {0, 1, 2, 3}, {}, {3});
  RandomSource rng(2);
  const PointSet out = subsample(ps, 4, rng);
  EXPECT_EQ(out.injected_outliers(), (std::vector<PointId>{3}));
}

TEST(SubsampleTest, OutOfRangeIsConfigError) {
  const PointSet ps = Grid(5, 1);
  RandomSource rng(1);
  EXPECT_EQ(KindOf([&] { subsample(ps, 0, rng); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([&] { subsample(ps, 6, rng); }), ErrorKind::kConfig);
}

// inject_outliers

TEST(InjectTest, OnePercentOfFourThousand) {
  const PointSet ps = Grid(4000, 3);
  RandomSource rng(17);
  const PointSet out = inject_outliers(ps, 0.01, rng);
  EXPECT_EQ(out.injected_outliers().size(), 40u);
}

TEST(InjectTest, PerturbationWithinColumnRange) {
  const PointSet ps = Grid(500, 4);
  std::vector<double> col_max(4, 0.0);
  for (std::size_t i = 0; i < 500; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      col_max[j] = std::max(col_max[j], ps.at(static_cast<PointId>(i), j));
    }
  }
  RandomSource rng(23);
  const PointSet out = inject_outliers(ps, 0.05, rng);
  for (std::size_t i = 0; i < 500; ++i) {
    const auto id = static_cast<PointId>(i);
    for (std::size_t j = 0; j < 4; ++j) {
      if (out.is_injected(id)) {
        EXPECT_GE(out.at(id, j), ps.at(id, j));
        EXPECT_LE(out.at(id, j), ps.at(id, j) + col_max[j]);
      } else {
        EXPECT_EQ(out.at(id, j), ps.at(id, j));
      }
    }
  }
}

TEST(InjectTest, ZeroColumnUnchanged) {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) {
    v.push_back(0.0);
    v.push_back(static_cast<double>(i));
  }
  const PointSet ps(100, 2, v);
  RandomSource rng(4);
  const PointSet out = inject_outliers(ps, 0.1, rng);
  for (PointId id : out.injected_outliers()) EXPECT_EQ(out.at(id, 0), 0.0);
}

TEST(InjectTest, Deterministic) {
  const PointSet ps = Grid(300, 2);
  RandomSource a(99), b(99);
  const PointSet x = inject_outliers(ps, 0.02, a);
  const PointSet y = inject_outliers(ps, 0.02, b);
  EXPECT_EQ(x.injected_outliers(), y.injected_outliers());
  EXPECT_EQ(x.values(), y.values());
}

TEST(InjectTest, CountRoundsHalfToEven) {
  EXPECT_EQ(injected_count(4000, 0.01), 40u);
  EXPECT_EQ(injected_count(250, 0.01), 2u);  // 2.5
  EXPECT_EQ(injected_count(350, 0.01), 4u);  // 3.5
  EXPECT_EQ(injected_count(10, 1.0), 10u);
}

TEST(InjectTest, BadFractionIsConfigError) {
  const PointSet ps = Grid(10, 1);
  RandomSource rng(1);
  EXPECT_EQ(KindOf([&] { inject_outliers(ps, 0.0, rng); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([&] { inject_outliers(ps, 1.5, rng); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([&] { inject_outliers(ps, 0.01, rng); }), ErrorKind::kConfig);
}

// Scaling and hashing

TEST(ScaleTest, MinMaxToUnitInterval) {
  const PointSet ps(3, 2, {0, 5, 5, 5, 10, 5}, {}, {1});
  const PointSet out = min_max_scale(ps);
  EXPECT_EQ(out.values(), (std::vector<double>{0, 0, 0.5, 0, 1, 0}));
  EXPECT_EQ(out.injected_outliers(), ps.injected_outliers());
}

TEST(HashTest, SensitiveToValuesAndShape) {
  const PointSet a(2, 2, {1, 2, 3, 4});
  const PointSet b(4, 1, {1, 2, 3, 4});
  const PointSet c(2, 2, {1, 2, 3, 5});
  EXPECT_EQ(dataset_hash(a), dataset_hash(PointSet(2, 2, {1, 2, 3, 4})));
  EXPECT_NE(dataset_hash(a), dataset_hash(b));
  EXPECT_NE(dataset_hash(a), dataset_hash(c));
}

// RandomSource

TEST(RandomSourceTest, SameSeedSameStream) {
  RandomSource a(1234), b(1234), c(1235);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.NextU64();
    EXPECT_EQ(x, b.NextU64());
    differs |= x != c.NextU64();
  }
  EXPECT_TRUE(differs);
}

TEST(RandomSourceTest, SplitDependsOnlyOnSeedAndStream) {
  RandomSource a(8);
  a.NextU64();
  RandomSource b(8);
  EXPECT_EQ(a.Split(3).NextU64(), b.Split(3).NextU64());
  EXPECT_NE(b.Split(3).NextU64(), b.Split(4).NextU64());
}

TEST(RandomSourceTest, UniformRanges) {
  RandomSource rng(77);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const double u = rng.Uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    ++hist[rng.UniformIndex(7)];
  }
  for (int h : hist) EXPECT_GT(h, 800);
}

TEST(RandomSourceTest, SampleWithoutReplacementIsDistinct) {
  RandomSource rng(5);
  const auto s = rng.SampleWithoutReplacement(100, 100);
  std::set<std::size_t> seen(s.begin(), s.end());
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_EQ(*seen.rbegin(), 99u);
  EXPECT_TRUE(rng.SampleWithoutReplacement(10, 0).empty());
}

}  // namespace
}  // namespace fairkm
