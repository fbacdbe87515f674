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

// fairkm: fair k-means with outliers from the command line.
//
//   fairkm run          one experiment; appends a CSV row, writes JSON
//   fairkm sweep        grid of experiments, resumable
//   fairkm oracle-check LSFO against the exhaustive optimum on tiny instances
//   fairkm inject       standalone synthetic-outlier injection
//
// Exit codes: 0 ok, 2 config error, 3 data error, 4 guard refusal,
// 5 internal invariant violation.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "fairkm/dataset.h"
#include "fairkm/error.h"
#include "fairkm/experiment.h"

namespace {

int ExitCode(fairkm::ErrorKind kind) {
  switch (kind) {
    case fairkm::ErrorKind::kConfig: return 2;
    case fairkm::ErrorKind::kData: return 3;
    case fairkm::ErrorKind::kGuard: return 4;
    case fairkm::ErrorKind::kInvariant: return 5;
  }
  return 5;
}

// Value-taking flags of `run`, named after their config keys.
const char* const kValueKeys[] = {
    "dataset", "columns", "subsample", "outlier_fraction", "k", "m", "gamma",
    "eps", "seed", "stage3", "stage3_budget", "discard_policy",
    "max_outer_iters", "algorithm", "output", "report", "radii_cache"};
const char* const kFlagKeys[] = {"scale", "audit_zones", "timings"};

std::string FlagName(const std::string& key) {
  std::string flag = "--" + key;
  for (char& c : flag) {
    if (c == '_') c = '-';
  }
  return flag;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Individually fair k-means clustering with outliers"};
  app.require_subcommand(1);

  // run
  CLI::App* run = app.add_subcommand("run", "Run one experiment");
  std::string run_config;
  run->add_option("--config", run_config, "key = value config file; flags override it");
  std::map<std::string, std::string> run_values;
  std::map<std::string, bool> run_flags;
  for (const char* key : kValueKeys) {
    run->add_option(FlagName(key), run_values[key]);
  }
  for (const char* key : kFlagKeys) {
    run->add_flag(FlagName(key), run_flags[key]);
  }

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter grid");
  std::string grid_path;
  std::string sweep_output;
  sweep->add_option("--grid", grid_path, "grid file; keys may list values")->required();
  sweep->add_option("--output", sweep_output, "results CSV (overrides the grid)");

  // oracle-check
  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "Compare LSFO with the exhaustive optimum on tiny instances");
  fairkm::OracleAuditParams audit;
  bool verbose = false;
  oracle->add_option("--instances", audit.instances, "feasible instances to audit");
  oracle->add_option("--seed", audit.seed);
  oracle->add_option("--max-n", audit.max_n)->check(CLI::Range(4, 14));
  oracle->add_option("--eps", audit.eps);
  oracle->add_flag("--verbose", verbose, "one line per instance");

  // inject
  CLI::App* inject = app.add_subcommand("inject", "Inject synthetic outliers into a CSV");
  std::string in_path, out_path, columns;
  double fraction = 0.01;
  std::uint64_t seed = 0;
  std::size_t subsample_n = 0;
  bool scale = false;
  inject->add_option("--dataset", in_path)->required();
  inject->add_option("--output", out_path)->required();
  inject->add_option("--fraction", fraction);
  inject->add_option("--seed", seed);
  inject->add_option("--subsample", subsample_n);
  inject->add_option("--columns", columns, "comma-separated names or indices");
  inject->add_flag("--scale", scale, "min-max scale before injecting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      fairkm::ConfigMap map;
      if (!run_config.empty()) map = fairkm::load_config_file(run_config);
      for (const char* key : kValueKeys) {
        if (run->count(FlagName(key)) > 0) map[key] = run_values[key];
      }
      for (const char* key : kFlagKeys) {
        if (run_flags[key]) map[key] = "true";
      }
      const fairkm::ExperimentConfig config = fairkm::config_from_map(map);
      const fairkm::RunResult result = fairkm::run_experiment(config);
      std::cout << fairkm::kResultsHeader << '\n' << result.csv_row << '\n';
      return 0;
    }
    if (*sweep) {
      fairkm::ConfigMap grid = fairkm::load_config_file(grid_path);
      if (!sweep_output.empty()) grid["output"] = sweep_output;
      const fairkm::SweepResult result = fairkm::run_sweep(grid);
      std::cout << "cells " << result.cells << ", ran " << result.ran
                << ", skipped " << result.skipped << ", failed "
                << result.failures.size() << '\n';
      for (const auto& f : result.failures) std::cerr << f << '\n';
      return result.failures.empty() ? 0 : 3;
    }
    if (*oracle) {
      const fairkm::OracleAuditResult result = fairkm::run_oracle_audit(audit);
      std::size_t lower = 0, upper = 0, local = 0, other = 0;
      for (const auto& c : result.cases) {
        lower += !c.lower_ok;
        upper += !c.upper_ok;
        local += !c.local_opt_ok;
        other += !c.monotone_ok || !c.cap_ok || !c.outlier_bound_ok ||
                 c.zone_violations > 0;
        if (verbose) {
          std::printf("n=%zu k=%zu m=%zu gamma=%g opt=%.6g lsfo=%.6g |Z|=%zu%s%s\n",
                      c.n, c.k, c.m, c.gamma, c.opt, c.lsfo_cost, c.lsfo_outliers,
                      c.lower_ok ? "" : " below-opt", c.upper_ok ? "" : " above-bound");
        }
      }
      std::printf("instances %zu (infeasible skipped %zu)\n", result.cases.size(),
                  result.infeasible_skipped);
      std::printf("cost below opt: %zu, above %gx opt: %zu, max ratio %.4g\n", lower,
                  audit.approx_factor, upper, result.max_ratio);
      std::printf("local optimality failures: %zu, other invariant failures: %zu\n",
                  local, other);
      return (lower || upper || local || other) ? 5 : 0;
    }
    if (*inject) {
      std::optional<std::vector<std::string>> selector;
      if (!columns.empty()) {
        fairkm::ConfigMap m = fairkm::parse_config_text("columns = " + columns);
        selector = fairkm::config_from_map(m).columns;
      }
      fairkm::RandomSource root(seed);
      fairkm::PointSet ps = fairkm::load_csv(in_path, selector);
      if (subsample_n > 0) {
        fairkm::RandomSource rng = root.Split(1);
        ps = fairkm::subsample(ps, subsample_n, rng);
      }
      if (scale) ps = fairkm::min_max_scale(ps);
      fairkm::RandomSource rng = root.Split(2);
      ps = fairkm::inject_outliers(ps, fraction, rng);
      fairkm::write_csv(ps, out_path);
      std::cout << "injected " << ps.injected_outliers().size() << " of "
                << ps.size() << " rows into " << out_path << '\n';
      return 0;
    }
  } catch (const fairkm::Error& e) {
    std::cerr << "fairkm: " << e.what() << '\n';
    return ExitCode(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "fairkm: internal error: " << e.what() << '\n';
    return 5;
  }
  return 0;
}
