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

#include "fairkm/experiment.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fairkm/error.h"
#include "test_util.h"

namespace fairkm {
namespace {

using testing::ReadFile;
using testing::TempPath;
using testing::WriteFile;

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// Small two-column dataset with a header.
std::string SmallDataset(const std::string& name, std::size_t n = 120) {
  RandomSource rng(2718);
  const PointSet ps = testing::RandomPoints(n, 2, rng, 50.0);
  const std::string path = TempPath(name);
  write_csv(ps, path, false);
  return path;
}

int RunCli(const std::string& args) {
  const std::string cmd = std::string(FAIRKM_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig BaseConfig(const std::string& dataset) {
  ConfigMap map = parse_config_text("dataset = " + dataset +
                                    "\nk = 3\nm = 2\noutlier_fraction = 0.05\n"
                                    "seed = 11\naudit_zones = true\n");
  return config_from_map(map);
}

// Config handling

TEST(ConfigTest, ParsesCommentsAndWhitespace) {
  const ConfigMap m = parse_config_text("# header\n k = 5 \n\ngamma=2 # trailing\n");
  EXPECT_EQ(m.at("k"), "5");
  EXPECT_EQ(m.at("gamma"), "2");
  EXPECT_EQ(m.size(), 2u);
  EXPECT_THROW(parse_config_text("no equals sign"), Error);
}

TEST(ConfigTest, RoundTripsThroughText) {
  ConfigMap map = parse_config_text(
      "dataset = a.csv\ncolumns = age,hours\nsubsample = 400\nk = 7\nm = 4\n"
      "gamma = 2.5\neps = 0.001\nseed = 99\nstage3 = sampled\nstage3_budget = 64\n"
      "discard_policy = last_covered\nmax_outer_iters = 12\nalgorithm = greedy\n"
      "scale = true\naudit_zones = true\noutlier_fraction = 0\n");
  const ExperimentConfig c = config_from_map(map);
  const ExperimentConfig back = config_from_map(parse_config_text(config_to_text(c)));
  EXPECT_EQ(config_to_text(back), config_to_text(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(back.columns, (std::vector<std::string>{"age", "hours"}));
  EXPECT_EQ(back.stage3, Stage3Mode::kSampled);
  EXPECT_EQ(back.algorithm, Algorithm::kGreedy);
}

TEST(ConfigTest, DefaultsMatchPublishedSettings) {
  const ExperimentConfig c = config_from_map({{"dataset", "x.csv"}});
  EXPECT_EQ(c.gamma, 3.0);
  EXPECT_EQ(c.eps, 1e-4);
  EXPECT_EQ(c.outlier_fraction, 0.01);
  EXPECT_EQ(effective_m(c, 4000), 40u);
  EXPECT_EQ(effective_m(config_from_map({{"m", "7"}}), 4000), 7u);
}

TEST(ConfigTest, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_map({{"kay", "3"}}), Error);
  EXPECT_THROW(config_from_map({{"k", "three"}}), Error);
  EXPECT_THROW(config_from_map({{"gamma", "0.5"}}), Error);
  EXPECT_THROW(config_from_map({{"eps", "0"}}), Error);
  EXPECT_THROW(config_from_map({{"algorithm", "kmeans"}}), Error);
}

TEST(ConfigTest, HashIgnoresOutputs) {
  ExperimentConfig a = config_from_map({{"dataset", "x.csv"}, {"k", "4"}});
  ExperimentConfig b = a;
  b.output = "out.csv";
  b.report = "r.json";
  b.timings = true;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

// run_experiment

TEST(RunTest, LsfoRowIsRederivableFromReport) {
  const std::string data = SmallDataset("run_small.csv");
  ExperimentConfig c = BaseConfig(data);
  c.output = TempPath("run_small_results.csv");
  c.report = TempPath("run_small_report.json");
  std::filesystem::remove(c.output);
  const RunResult r = run_experiment(c);
  ASSERT_TRUE(r.solve.has_value());
  EXPECT_EQ(r.n, 120u);
  EXPECT_EQ(r.m, 2u);

  const std::vector<std::string> lines = Lines(ReadFile(c.output));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], kResultsHeader);
  EXPECT_EQ(lines[1], r.csv_row);

  const nlohmann::json j = nlohmann::json::parse(ReadFile(c.report));
  EXPECT_EQ(j["config_hash"], config_hash(c));
  EXPECT_FALSE(j["config"].contains("output"));
  // Recompute the summary from the reported centers and outliers.
  const PointSet ps = [&] {
    RandomSource root(c.seed);
    RandomSource inject = root.Split(2);
    return inject_outliers(load_csv(data), c.outlier_fraction, inject);
  }();
  const std::vector<PointId> centers = j["result"]["centers"];
  const std::vector<PointId> outliers = j["result"]["outliers"];
  const double want_cost = cost(ps, centers, outliers, testing::AllIds(ps.size()));
  const double want_rho = max_bound_ratio(ps, centers, outliers, fair_radii(ps, c.k));
  EXPECT_NEAR(j["summary"]["cost"].get<double>(), want_cost, 1e-9 * want_cost);
  EXPECT_NEAR(j["summary"]["rho"].get<double>(), want_rho, 1e-9 * want_rho);
  EXPECT_EQ(j["summary"]["n_outliers"].get<std::size_t>(), outliers.size());
  EXPECT_EQ(j["summary"]["injected_outliers"], 6);
  EXPECT_FALSE(j["summary"].contains("ms"));
}

TEST(RunTest, GreedyAndOracleAlgorithms) {
  const std::string data = SmallDataset("run_tiny.csv", 9);
  ExperimentConfig c = BaseConfig(data);
  c.outlier_fraction = 0.0;
  c.k = 2;
  c.m = 1;
  c.algorithm = Algorithm::kGreedy;
  const RunResult g = run_experiment(c);
  EXPECT_EQ(g.summary.centers.size(), 2u);
  EXPECT_EQ(g.summary.n_outliers, 0u);
  c.algorithm = Algorithm::kOracle;
  c.gamma = 5.0;
  const RunResult o = run_experiment(c);
  EXPECT_LE(o.summary.n_outliers, 1u);
  EXPECT_NE(o.csv_row.find(",oracle,"), std::string::npos);
}

TEST(RunTest, OracleRefusesLargeInput) {
  ExperimentConfig c = BaseConfig(SmallDataset("run_small.csv"));
  c.algorithm = Algorithm::kOracle;
  try {
    run_experiment(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kGuard);
    EXPECT_NE(std::string(e.what()).find("oracle"), std::string::npos);
  }
}

TEST(RunTest, MissingDatasetNamesStage) {
  ExperimentConfig c = BaseConfig(TempPath("nope.csv"));
  try {
    run_experiment(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
    EXPECT_NE(std::string(e.what()).find("load"), std::string::npos);
  }
}

TEST(RunTest, RadiiCacheGivesSameResult) {
  ExperimentConfig c = BaseConfig(SmallDataset("run_small.csv"));
  c.radii_cache = TempPath("run_small_radii.csv");
  std::filesystem::remove(c.radii_cache);
  const RunResult first = run_experiment(c);
  ASSERT_TRUE(std::filesystem::exists(c.radii_cache));
  const RunResult second = run_experiment(c);
  EXPECT_EQ(first.report.dump(), second.report.dump());
}

// Sweeps

TEST(SweepTest, EmptyGridWritesHeaderOnly) {
  const std::string out = TempPath("sweep_empty.csv");
  std::filesystem::remove(out);
  const SweepResult r = run_sweep({{"output", out}});
  EXPECT_EQ(r.cells, 0u);
  EXPECT_EQ(ReadFile(out), std::string(kResultsHeader) + "\n");
  const std::string out2 = TempPath("sweep_empty_axis.csv");
  std::filesystem::remove(out2);
  EXPECT_EQ(run_sweep({{"output", out2}, {"k", ""}, {"dataset", "x"}}).cells, 0u);
  EXPECT_EQ(Lines(ReadFile(out2)).size(), 1u);
}

TEST(SweepTest, GridRunsEveryCellAndResumes) {
  const std::string out = TempPath("sweep_grid.csv");
  std::filesystem::remove(out);
  const ConfigMap grid = {{"dataset", SmallDataset("run_small.csv")},
                          {"k", "2,3"},
                          {"gamma", "1,3"},
                          {"m", "2"},
                          {"seed", "5"},
                          {"outlier_fraction", "0.05"},
                          {"output", out}};
  const SweepResult first = run_sweep(grid);
  EXPECT_EQ(first.cells, 4u);
  EXPECT_EQ(first.ran, 4u);
  EXPECT_TRUE(first.failures.empty());
  const std::string before = ReadFile(out);
  EXPECT_EQ(Lines(before).size(), 5u);
  const SweepResult again = run_sweep(grid);
  EXPECT_EQ(again.ran, 0u);
  EXPECT_EQ(again.skipped, 4u);
  EXPECT_EQ(ReadFile(out), before);
}

TEST(SweepTest, FailingCellsAreCollected) {
  const std::string out = TempPath("sweep_fail.csv");
  std::filesystem::remove(out);
  const SweepResult r = run_sweep({{"dataset", SmallDataset("run_small.csv")},
                                   {"k", "2,500"},
                                   {"m", "1"},
                                   {"output", out}});
  EXPECT_EQ(r.ran, 1u);
  EXPECT_EQ(r.failures.size(), 1u);
}

// Oracle audit

TEST(OracleAuditTest, UpperSideAndCertificatesHold) {
  OracleAuditParams p;
  p.instances = 40;
  const OracleAuditResult r = run_oracle_audit(p);
  EXPECT_EQ(r.cases.size(), 40u);
  for (const auto& c : r.cases) {
    EXPECT_TRUE(c.upper_ok);
    EXPECT_TRUE(c.local_opt_ok);
    EXPECT_TRUE(c.monotone_ok);
    EXPECT_TRUE(c.cap_ok);
    EXPECT_TRUE(c.outlier_bound_ok);
    EXPECT_EQ(c.zone_violations, 0u);
  }
  EXPECT_LE(r.max_ratio, p.approx_factor);
}

// Command line

TEST(CliTest, RunIsByteIdenticalAcrossInvocations) {
  const std::string data = SmallDataset("cli_small.csv");
  const std::string a = TempPath("cli_a.json");
  const std::string b = TempPath("cli_b.json");
  const std::string args = "run --dataset " + data + " --k 3 --m 2 --seed 4 --outlier-fraction 0.05";
  ASSERT_EQ(RunCli(args + " --report " + a), 0);
  ASSERT_EQ(RunCli(args + " --report " + b), 0);
  EXPECT_EQ(ReadFile(a), ReadFile(b));
  EXPECT_FALSE(ReadFile(a).empty());
}

TEST(CliTest, ExitCodes) {
  const std::string data = SmallDataset("cli_small.csv");
  EXPECT_EQ(RunCli("run --dataset " + data + " --k 3 --algorithm oracle"), 4);
  EXPECT_EQ(RunCli("run --dataset " + TempPath("missing.csv")), 3);
  EXPECT_EQ(RunCli("run --dataset " + data + " --k zero"), 2);
  EXPECT_EQ(RunCli("run --bogus-flag 1"), 2);
  EXPECT_EQ(RunCli(""), 2);
  const std::string cfg = TempPath("cli_bad.cfg");
  WriteFile(cfg, "dataset = " + data + "\nunknown_key = 1\n");
  EXPECT_EQ(RunCli("run --config " + cfg), 2);
}

TEST(CliTest, ConfigFileWithFlagOverride) {
  const std::string data = SmallDataset("cli_small.csv");
  const std::string cfg = TempPath("cli_ok.cfg");
  const std::string out = TempPath("cli_ok.csv");
  std::filesystem::remove(out);
  WriteFile(cfg, "dataset = " + data + "\nk = 9\nm = 2\nalgorithm = greedy\n");
  ASSERT_EQ(RunCli("run --config " + cfg + " --k 2 --output " + out), 0);
  const std::vector<std::string> lines = Lines(ReadFile(out));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_NE(lines[1].find(",2,2,"), std::string::npos) << lines[1];
}

TEST(CliTest, InjectWritesMarkedCsv) {
  const std::string data = SmallDataset("cli_small.csv");
  const std::string out = TempPath("cli_injected.csv");
  ASSERT_EQ(RunCli("inject --dataset " + data + " --output " + out +
                   " --fraction 0.05 --seed 3"),
            0);
  const PointSet ps = load_csv(out);
  EXPECT_EQ(ps.dim(), 3u);
  double marked = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) marked += ps.at(static_cast<PointId>(i), 2);
  EXPECT_EQ(marked, 6.0);
}

TEST(CliTest, OracleCheckRuns) {
  const int code = RunCli("oracle-check --instances 5 --seed 3");
  EXPECT_TRUE(code == 0 || code == 5) << code;
  EXPECT_EQ(RunCli("oracle-check --max-n 40"), 2);
}

}  // namespace
}  // namespace fairkm
