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

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "fairkm/error.h"

namespace fairkm {

namespace {

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "dataset", "columns",  "subsample", "outlier_fraction", "scale",
      "k",       "m",        "gamma",     "eps",              "seed",
      "stage3",  "stage3_budget", "discard_policy", "max_outer_iters",
      "algorithm", "audit_zones", "output", "report", "radii_cache",
      "timings"};
  return keys;
}

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitList(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (Trim(s).empty()) return out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(Trim(item));
  return out;
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T>
T ParseUnsigned(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" +
                      value + "'");
  }
  return out;
}

double ParseReal(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw ConfigError("'" + key + "' expects a real number, got '" + value + "'");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + value + "'");
}

std::string Hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t Fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const char* AlgorithmName(Algorithm a) {
  switch (a) {
    case Algorithm::kLsfo: return "lsfo";
    case Algorithm::kGreedy: return "greedy";
    case Algorithm::kOracle: return "oracle";
  }
  return "?";
}

// Re-throws `e` with the pipeline stage prefixed, keeping its kind.
template <typename Fn>
auto Stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw InvariantError(std::string(name) + ": " + e.what());
  }
}

bool RelativelyClose(double a, double b, double tol) {
  if (a == b) return true;
  return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

void AppendCsvRow(const std::string& path, const std::string& row) {
  namespace fs = std::filesystem;
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw DataError("cannot append to '" + path + "'");
  if (fresh) out << kResultsHeader << '\n';
  out << row << '\n';
  if (!out) throw DataError("write failure on '" + path + "'");
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::stringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (Trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    out[key] = Trim(line.substr(eq + 1));
  }
  return out;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

ExperimentConfig config_from_map(const ConfigMap& map) {
  ExperimentConfig c;
  for (const auto& [key, value] : map) {
    if (!KnownKeys().count(key)) throw ConfigError("unknown config key '" + key + "'");
    if (key == "dataset") {
      c.dataset = value;
    } else if (key == "columns") {
      auto cols = SplitList(value, ',');
      if (!cols.empty()) c.columns = cols;
    } else if (key == "subsample") {
      c.subsample = ParseUnsigned<std::size_t>(key, value);
    } else if (key == "outlier_fraction") {
      c.outlier_fraction = ParseReal(key, value);
    } else if (key == "scale") {
      c.scale = ParseBool(key, value);
    } else if (key == "k") {
      c.k = ParseUnsigned<std::size_t>(key, value);
    } else if (key == "m") {
      c.m = ParseUnsigned<std::size_t>(key, value);
    } else if (key == "gamma") {
      c.gamma = ParseReal(key, value);
    } else if (key == "eps") {
      c.eps = ParseReal(key, value);
    } else if (key == "seed") {
      c.seed = ParseUnsigned<std::uint64_t>(key, value);
    } else if (key == "stage3") {
      if (value == "auto") c.stage3 = Stage3Mode::kAuto;
      else if (value == "full") c.stage3 = Stage3Mode::kFull;
      else if (value == "sampled") c.stage3 = Stage3Mode::kSampled;
      else throw ConfigError("stage3 must be auto, full or sampled");
    } else if (key == "stage3_budget") {
      c.stage3_budget = ParseUnsigned<std::size_t>(key, value);
    } else if (key == "discard_policy") {
      if (value == "largest_radius") c.discard_policy = DiscardPolicy::kLargestRadius;
      else if (value == "last_covered") c.discard_policy = DiscardPolicy::kLastCovered;
      else throw ConfigError("discard_policy must be largest_radius or last_covered");
    } else if (key == "max_outer_iters") {
      c.max_outer_iters = ParseUnsigned<std::size_t>(key, value);
    } else if (key == "algorithm") {
      if (value == "lsfo") c.algorithm = Algorithm::kLsfo;
      else if (value == "greedy") c.algorithm = Algorithm::kGreedy;
      else if (value == "oracle") c.algorithm = Algorithm::kOracle;
      else throw ConfigError("algorithm must be lsfo, greedy or oracle");
    } else if (key == "audit_zones") {
      c.audit_zones = ParseBool(key, value);
    } else if (key == "output") {
      c.output = value;
    } else if (key == "report") {
      c.report = value;
    } else if (key == "radii_cache") {
      c.radii_cache = value;
    } else if (key == "timings") {
      c.timings = ParseBool(key, value);
    }
  }
  if (c.k < 1) throw ConfigError("k must be at least 1");
  if (!(c.gamma >= 1.0)) throw ConfigError("gamma must be at least 1");
  if (!(c.eps > 0.0)) throw ConfigError("eps must be positive");
  if (!(c.outlier_fraction >= 0.0 && c.outlier_fraction <= 1.0)) {
    throw ConfigError("outlier_fraction must lie in [0, 1]");
  }
  if (c.subsample && *c.subsample < 1) throw ConfigError("subsample must be positive");
  if (c.stage3_budget < 1) throw ConfigError("stage3_budget must be positive");
  return c;
}

std::string config_to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  auto line = [&out](const char* key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  line("dataset", c.dataset);
  if (c.columns) {
    std::string joined;
    for (std::size_t i = 0; i < c.columns->size(); ++i) {
      if (i) joined += ',';
      joined += (*c.columns)[i];
    }
    line("columns", joined);
  }
  if (c.subsample) line("subsample", std::to_string(*c.subsample));
  line("outlier_fraction", FormatDouble(c.outlier_fraction));
  line("scale", c.scale ? "true" : "false");
  line("k", std::to_string(c.k));
  if (c.m) line("m", std::to_string(*c.m));
  line("gamma", FormatDouble(c.gamma));
  line("eps", FormatDouble(c.eps));
  line("seed", std::to_string(c.seed));
  line("stage3", c.stage3 == Stage3Mode::kAuto   ? "auto"
                 : c.stage3 == Stage3Mode::kFull ? "full"
                                                 : "sampled");
  line("stage3_budget", std::to_string(c.stage3_budget));
  line("discard_policy", c.discard_policy == DiscardPolicy::kLargestRadius
                             ? "largest_radius"
                             : "last_covered");
  if (c.max_outer_iters) line("max_outer_iters", std::to_string(*c.max_outer_iters));
  line("algorithm", AlgorithmName(c.algorithm));
  line("audit_zones", c.audit_zones ? "true" : "false");
  if (!c.output.empty()) line("output", c.output);
  if (!c.report.empty()) line("report", c.report);
  if (!c.radii_cache.empty()) line("radii_cache", c.radii_cache);
  line("timings", c.timings ? "true" : "false");
  return out.str();
}

std::string config_hash(const ExperimentConfig& config) {
  ExperimentConfig identity = config;
  identity.output.clear();
  identity.report.clear();
  identity.radii_cache.clear();
  identity.timings = false;
  return Hex(Fnv1a(config_to_text(identity)));
}

std::size_t effective_m(const ExperimentConfig& config, std::size_t n) {
  return config.m.value_or(injected_count(n, 0.01));
}

PointSet prepare_points(const ExperimentConfig& config) {
  if (config.dataset.empty()) throw ConfigError("no dataset given");
  const RandomSource root(config.seed);
  PointSet ps = Stage("load", [&] { return load_csv(config.dataset, config.columns); });
  if (config.subsample) {
    ps = Stage("subsample", [&] {
      RandomSource rng = root.Split(1);
      return subsample(ps, *config.subsample, rng);
    });
  }
  if (config.scale) ps = min_max_scale(ps);
  if (config.outlier_fraction > 0.0) {
    ps = Stage("inject", [&] {
      RandomSource rng = root.Split(2);
      return inject_outliers(ps, config.outlier_fraction, rng);
    });
  }
  return ps;
}

RunResult run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const RandomSource root(config.seed);
  const PointSet ps = prepare_points(config);
  const std::size_t n = ps.size();
  const std::size_t m = effective_m(config, n);

  FairRadii delta = Stage("fair_radii", [&] {
    const std::uint64_t hash = dataset_hash(ps);
    if (!config.radii_cache.empty()) {
      if (auto cached = read_radii_csv(config.radii_cache, hash, config.k);
          cached && cached->size() == n) {
        return *cached;
      }
    }
    FairRadii radii = fair_radii(ps, config.k);
    if (!config.radii_cache.empty()) {
      write_radii_csv(radii, hash, config.k, config.radii_cache);
    }
    return radii;
  });
  AspectRatio aspect;
  try {
    aspect = aspect_ratio(ps);
  } catch (const Error&) {
    aspect = AspectRatio{};
  }

  RunResult result;
  result.n = n;
  result.m = m;
  EvalSummary& summary = result.summary;
  nlohmann::json detail;
  RandomSource algo_rng = root.Split(3);
  switch (config.algorithm) {
    case Algorithm::kLsfo: {
      LsfoParams params;
      params.k = config.k;
      params.m = m;
      params.gamma = config.gamma;
      params.eps = config.eps;
      params.stage3 = config.stage3;
      params.stage3_budget = config.stage3_budget;
      params.discard_policy = config.discard_policy;
      params.max_outer_iters = config.max_outer_iters;
      params.audit_zones = config.audit_zones;
      SolveReport solve = Stage("lsfo", [&] { return lsfo(ps, delta, params, algo_rng); });
      std::vector<PointId> all(n);
      std::iota(all.begin(), all.end(), 0);
      summary.kmeans_cost = cost(ps, solve.state.centers, solve.state.outliers, all);
      summary.rho = max_bound_ratio(ps, solve.state.centers, solve.state.outliers, delta);
      summary.n_outliers = solve.state.outliers.size();
      summary.centers = solve.state.centers;
      if (!RelativelyClose(summary.kmeans_cost, solve.cost, 1e-9) ||
          !RelativelyClose(summary.rho, solve.rho, 1e-9)) {
        throw InvariantError("evaluation: recomputed cost/rho disagree with the solver");
      }
      if (config.audit_zones && solve.zone_violations > 0) {
        throw InvariantError("lsfo: " + std::to_string(solve.zone_violations) +
                             " accepted states left a hard zone empty");
      }
      detail = to_json(solve, config.timings);
      result.solve = std::move(solve);
      break;
    }
    case Algorithm::kGreedy: {
      summary = Stage("greedy", [&] {
        return greedy_baseline(ps, delta, config.k, config.gamma, algo_rng);
      });
      detail = {{"centers", summary.centers}};
      break;
    }
    case Algorithm::kOracle: {
      OracleResult opt = Stage("oracle", [&] {
        return brute_force_opt(ps, delta, config.k, m, config.gamma);
      });
      if (!opt.feasible) throw DataError("oracle: instance is infeasible");
      summary.kmeans_cost = opt.cost;
      summary.rho = max_bound_ratio(ps, opt.centers, opt.outliers, delta);
      summary.n_outliers = opt.outliers.size();
      summary.centers = opt.centers;
      detail = {{"centers", opt.centers}, {"outliers", opt.outliers}};
      break;
    }
  }
  summary.bound_m_plus = outlier_bound(m, config.k, config.eps, n, aspect);
  summary.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();

  const std::string hash = config_hash(config);
  std::ostringstream row;
  row << std::filesystem::path(config.dataset).filename().string() << ',' << n
      << ',' << config.k << ',' << m << ',' << FormatDouble(config.gamma) << ','
      << FormatDouble(config.eps) << ',' << config.seed << ','
      << AlgorithmName(config.algorithm) << ',' << FormatDouble(summary.kmeans_cost)
      << ',' << FormatDouble(summary.rho) << ',' << summary.n_outliers << ','
      << FormatDouble(summary.bound_m_plus) << ',' << summary.runtime_ms << ','
      << hash;
  result.csv_row = row.str();

  auto finite_or_null = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::json summary_json = {
      {"algorithm", AlgorithmName(config.algorithm)},
      {"n", n},
      {"m", m},
      {"cost", finite_or_null(summary.kmeans_cost)},
      {"rho", finite_or_null(summary.rho)},
      {"n_outliers", summary.n_outliers},
      {"bound", finite_or_null(summary.bound_m_plus)},
      {"bound_log_base", "e"},
      {"aspect_ratio", finite_or_null(aspect.delta_max_over_min)},
      {"aspect_ratio_approximate", aspect.approximate},
      {"injected_outliers", ps.injected_outliers().size()}};
  if (config.timings) summary_json["ms"] = summary.runtime_ms;
  ExperimentConfig identity = config;
  identity.output.clear();
  identity.report.clear();
  identity.radii_cache.clear();
  result.report = {{"config_hash", hash},
                   {"config", parse_config_text(config_to_text(identity))},
                   {"summary", summary_json},
                   {"result", detail}};

  if (!config.output.empty()) {
    Stage("output", [&] { AppendCsvRow(config.output, result.csv_row); });
  }
  if (!config.report.empty()) {
    Stage("output", [&] {
      std::ofstream out(config.report);
      if (!out) throw DataError("cannot write '" + config.report + "'");
      out << result.report.dump(2) << '\n';
    });
  }
  return result;
}

SweepResult run_sweep(const ConfigMap& grid) {
  std::vector<std::string> keys;
  std::vector<std::vector<std::string>> values;
  for (const auto& [key, value] : grid) {
    keys.push_back(key);
    values.push_back(key == "columns" ? std::vector<std::string>{value}
                                      : SplitList(value, ','));
  }
  auto output_it = grid.find("output");
  if (output_it == grid.end() || output_it->second.empty()) {
    throw ConfigError("sweep needs an output CSV");
  }
  const std::string output = output_it->second;
  const bool seed_swept = grid.count("seed") && SplitList(grid.at("seed"), ',').size() > 1;
  const std::uint64_t base_seed =
      grid.count("seed") && !seed_swept
          ? ParseUnsigned<std::uint64_t>("seed", grid.at("seed"))
          : 0;

  SweepResult result;
  result.cells = grid.size() > 1 ? 1 : 0;  // `output` alone is an empty grid
  for (const auto& v : values) result.cells *= v.size();

  {
    namespace fs = std::filesystem;
    if (!fs::exists(output) || fs::file_size(output) == 0) {
      std::ofstream out(output);
      if (!out) throw DataError("cannot write '" + output + "'");
      out << kResultsHeader << '\n';
    }
  }
  std::set<std::string> done;
  {
    std::ifstream in(output);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const auto comma = line.rfind(',');
      if (comma != std::string::npos) done.insert(line.substr(comma + 1));
    }
  }

  std::vector<std::size_t> digit(keys.size(), 0);
  for (std::size_t cell = 0; cell < result.cells; ++cell) {
    ConfigMap cell_map;
    for (std::size_t i = 0; i < keys.size(); ++i) cell_map[keys[i]] = values[i][digit[i]];
    if (!seed_swept) cell_map["seed"] = std::to_string(MixSeed(base_seed, cell));
    cell_map["output"] = output;
    try {
      ExperimentConfig config = config_from_map(cell_map);
      const std::string hash = config_hash(config);
      if (done.count(hash)) {
        ++result.skipped;
      } else {
        run_experiment(config);
        done.insert(hash);
        ++result.ran;
      }
    } catch (const std::exception& e) {
      result.failures.push_back("cell " + std::to_string(cell) + ": " + e.what());
    }
    for (std::size_t i = keys.size(); i-- > 0;) {
      if (++digit[i] < values[i].size()) break;
      digit[i] = 0;
    }
  }
  return result;
}

bool descent_is_monotone(const SolveReport& report) {
  const double factor = 1.0 - report.params.eps / static_cast<double>(report.params.k);
  for (const auto& it : report.iterations) {
    if (!it.accepted) continue;
    if (it.cost_after > factor * it.cost_before + 1e-12 * it.cost_before) return false;
  }
  return true;
}

OracleAuditResult run_oracle_audit(const OracleAuditParams& params) {
  OracleAuditResult out;
  RandomSource rng(params.seed);
  const std::size_t max_attempts = params.instances * 100 + 100;
  for (std::size_t attempt = 0;
       out.cases.size() < params.instances && attempt < max_attempts; ++attempt) {
    const std::size_t n =
        params.min_n + rng.UniformIndex(params.max_n - params.min_n + 1);
    const std::size_t k = 1 + rng.UniformIndex(std::min(params.max_k, n));
    const std::size_t m = rng.UniformIndex(std::min(params.max_m, n - k) + 1);
    const double gamma = params.gammas[rng.UniformIndex(params.gammas.size())];
    std::vector<double> values(n * 2);
    for (double& v : values) v = std::floor(rng.Uniform01() * 1000.0) / 100.0;
    const PointSet ps(n, 2, std::move(values));
    bool distinct = true;
    try {
      aspect_ratio(ps);
    } catch (const Error&) {
      distinct = false;
    }
    if (!distinct) continue;
    const FairRadii delta = fair_radii(ps, k);
    const OracleResult opt = brute_force_opt(
        ps, delta, k, m, gamma, OracleLimits{params.max_n, params.max_k, params.max_m});
    if (!opt.feasible) {
      ++out.infeasible_skipped;
      continue;
    }

    LsfoParams lp;
    lp.k = k;
    lp.m = m;
    lp.gamma = gamma;
    lp.eps = params.eps;
    lp.stage3 = Stage3Mode::kFull;
    lp.audit_zones = true;
    RandomSource run_rng = rng.Split(attempt);
    const SolveReport rep = lsfo(ps, delta, lp, run_rng);

    OracleAuditCase c;
    c.n = n;
    c.k = k;
    c.m = m;
    c.gamma = gamma;
    c.opt = opt.cost;
    c.lsfo_cost = rep.cost;
    c.lsfo_outliers = rep.state.outliers.size();
    const double slack = 1e-9 * std::max(opt.cost, rep.cost);
    c.lower_ok = opt.cost <= rep.cost + slack;
    c.upper_ok = rep.cost <= params.approx_factor * opt.cost + slack;
    c.local_opt_ok = local_optimality_check(ps, rep.state, rep.zones, m,
                                            params.eps, k).passed();
    c.monotone_ok = descent_is_monotone(rep);
    c.cap_ok = !rep.cap_hit && rep.iterations.size() <= rep.iteration_limit;
    c.outlier_bound_ok = static_cast<double>(rep.state.outliers.size()) <=
                         outlier_bound(m, k, params.eps, n, aspect_ratio(ps));
    c.zone_violations = rep.zone_violations;
    if (opt.cost > 0.0) out.max_ratio = std::max(out.max_ratio, rep.cost / opt.cost);
    out.cases.push_back(c);
  }
  return out;
}

}  // namespace fairkm
