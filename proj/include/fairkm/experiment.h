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

// Experiment harness behind the `fairkm` command-line tool.

#ifndef FAIRKM_EXPERIMENT_H_
#define FAIRKM_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairkm/local_search.h"
#include "fairkm/metrics.h"
#include "json.hpp"

namespace fairkm {

enum class Algorithm { kLsfo, kGreedy, kOracle };

struct ExperimentConfig {
  std::string dataset;
  std::optional<std::vector<std::string>> columns;
  std::optional<std::size_t> subsample;
  double outlier_fraction = 0.01;  // 0 disables injection
  bool scale = false;              // min-max scaling before injection
  std::size_t k = 10;
  std::optional<std::size_t> m;    // default: 1% of the (subsampled) n
  double gamma = 3.0;
  double eps = 1e-4;
  std::uint64_t seed = 0;
  Stage3Mode stage3 = Stage3Mode::kAuto;
  std::size_t stage3_budget = 512;
  DiscardPolicy discard_policy = DiscardPolicy::kLargestRadius;
  std::optional<std::size_t> max_outer_iters;
  Algorithm algorithm = Algorithm::kLsfo;
  bool audit_zones = false;
  // Outputs; not part of the config identity.
  std::string output;       // results CSV, appended
  std::string report;       // JSON report
  std::string radii_cache;  // fair-radii CSV cache
  bool timings = false;     // wall-clock fields in the JSON report
};

using ConfigMap = std::map<std::string, std::string>;

// Flat `key = value` lines; '#' starts a comment. Throws ConfigError.
ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

// Unknown keys and out-of-range values are ConfigErrors.
ExperimentConfig config_from_map(const ConfigMap& map);
std::string config_to_text(const ExperimentConfig& config);

// 16 hex digits over every field that changes results.
std::string config_hash(const ExperimentConfig& config);

// m used for a run on n points.
std::size_t effective_m(const ExperimentConfig& config, std::size_t n);

inline const char* const kResultsHeader =
    "dataset,n,k,m,gamma,eps,seed,algorithm,cost,rho,n_outliers,bound,ms,"
    "config_hash";

struct RunResult {
  EvalSummary summary;
  std::size_t n = 0;
  std::size_t m = 0;
  std::string csv_row;
  nlohmann::json report;
  std::optional<SolveReport> solve;  // LSFO runs only
};

// load -> subsample -> scale -> inject, with the run's random streams.
PointSet prepare_points(const ExperimentConfig& config);

// load -> subsample -> scale -> inject -> fair radii -> algorithm ->
// evaluation. Errors are rethrown with the failing stage named. Writes the
// CSV row and JSON report when the config names outputs.
RunResult run_experiment(const ExperimentConfig& config);

struct SweepResult {
  std::size_t cells = 0;
  std::size_t ran = 0;
  std::size_t skipped = 0;
  std::vector<std::string> failures;
};

// Each key may list comma-separated values (except `columns`); every
// combination is one cell. Without a swept `seed`, cell i runs with
// MixSeed(seed, i). Cells whose config hash already appears in the output
// CSV are skipped.
SweepResult run_sweep(const ConfigMap& grid);

struct OracleAuditParams {
  std::size_t instances = 200;
  std::size_t min_n = 4;
  std::size_t max_n = 10;
  std::size_t max_k = 3;
  std::size_t max_m = 2;
  std::vector<double> gammas = {1.0, 2.0, 3.0};
  double eps = 1e-4;
  double approx_factor = 274.0;
  std::uint64_t seed = 1;
};

struct OracleAuditCase {
  std::size_t n = 0, k = 0, m = 0;
  double gamma = 0.0;
  double opt = 0.0;
  double lsfo_cost = 0.0;
  std::size_t lsfo_outliers = 0;
  bool lower_ok = false;  // opt <= cost
  bool upper_ok = false;  // cost <= factor * opt
  bool local_opt_ok = false;
  bool monotone_ok = false;
  bool cap_ok = false;
  bool outlier_bound_ok = false;
  std::size_t zone_violations = 0;
};

struct OracleAuditResult {
  std::vector<OracleAuditCase> cases;  // feasible instances only
  std::size_t infeasible_skipped = 0;
  double max_ratio = 0.0;  // max cost / opt over opt > 0
};

// Random tiny instances, LSFO against brute_force_opt, plus the terminal
// local-optimality, monotonicity, cap and outlier-bound checks.
OracleAuditResult run_oracle_audit(const OracleAuditParams& params);

// Accepted outer iterations each shrink the cost by (1 - eps / k).
bool descent_is_monotone(const SolveReport& report);

}  // namespace fairkm

#endif  // FAIRKM_EXPERIMENT_H_
