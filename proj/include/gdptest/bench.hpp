//
// Copyright 2026 The gdp-testkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef GDPTEST_BENCH_HPP
#define GDPTEST_BENCH_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gdptest/baselines.hpp"
#include "gdptest/budget.hpp"
#include "gdptest/distribution.hpp"
#include "gdptest/error.hpp"
#include "gdptest/hypothesis.hpp"
#include "gdptest/mean.hpp"
#include "gdptest/noise.hpp"

namespace gdptest {

enum class ExperimentKind {
  kMeanComparison,
  kSimpleHt,
  kOneSidedHt,
  kTwoSidedHt,
};

inline std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kMeanComparison: return "mean-comparison";
    case ExperimentKind::kSimpleHt: return "simple-ht";
    case ExperimentKind::kOneSidedHt: return "one-sided-ht";
    case ExperimentKind::kTwoSidedHt: return "two-sided-ht";
  }
  return "unknown";
}

// Registry of estimator/test ids usable in experiment configs. Reserved ids
// name methods from other codebases the harness deliberately leaves as
// extension points; requesting one is a configuration error, not a typo.
inline const std::map<std::string, std::set<ExperimentKind>>&
method_registry() {
  static const std::map<std::string, std::set<ExperimentKind>> registry = {
      {"gdp-mean", {ExperimentKind::kMeanComparison}},
      {"naive-dd", {ExperimentKind::kMeanComparison}},
      {"nonprivate-mean", {ExperimentKind::kMeanComparison}},
      {"gdp-llr",
       {ExperimentKind::kSimpleHt, ExperimentKind::kOneSidedHt,
        ExperimentKind::kTwoSidedHt}},
      {"ncllr", {ExperimentKind::kSimpleHt}},
      {"nonprivate-llr",
       {ExperimentKind::kSimpleHt, ExperimentKind::kOneSidedHt,
        ExperimentKind::kTwoSidedHt}},
  };
  return registry;
}

inline const std::set<std::string>& reserved_method_ids() {
  static const std::set<std::string> reserved = {"coinpress", "shifted-cm",
                                                 "private-ks", "private-cvm"};
  return reserved;
}

// One data-generating configuration of an experiment (a distribution for
// mean comparison, an alternative for a test).
struct ExperimentCell {
  Distribution data_dist;
  std::string label;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kMeanComparison;
  std::vector<std::string> methods;
  std::vector<std::size_t> n_grid;
  std::vector<double> eps_grid;
  int replications = 200;
  double alpha = 0.05;
  int mc_reps = 199;
  std::uint64_t master_seed = 1;
  NoiseSource::Kind noise_kind = NoiseSource::Kind::kSeeded;
  MeanEstParams mean_params;
  ClampRange ncllr_clamp{-2.0, 2.0};

  std::vector<ExperimentCell> cells;               // data-generating grid
  std::optional<Distribution> null_dist;           // simple-ht
  std::optional<Distribution> alt_dist;            // simple-ht
  std::optional<Distribution> family;              // one-/two-sided null
};

struct ResultRow {
  std::string experiment;
  std::string method;
  std::string distribution;
  std::size_t n = 0;
  double epsilon = 0.0;
  int replicate = 0;
  std::string metric_name;
  double metric_value = 0.0;
};

namespace detail {

// Returns a copy of the family with its free location/natural parameter
// moved to theta (mean for normal, location for logistic, rate for gamma).
inline Distribution at_theta(const Distribution& family, double theta) {
  if (const auto* d = family.get_if<Normal>()) {
    return Distribution::normal(theta, d->sd);
  }
  if (const auto* d = family.get_if<Logistic>()) {
    return Distribution::logistic(theta, d->scale);
  }
  if (const auto* d = family.get_if<Gamma>()) {
    return Distribution::gamma(d->shape, theta);
  }
  throw ConfigError("family must be normal, logistic, or gamma");
}

inline int env_thread_cap() {
  const char* env = std::getenv("GDP_TESTKIT_THREADS");
  if (env == nullptr) return 0;  // 0: implementation default
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || v < 1) {
    throw ConfigError("GDP_TESTKIT_THREADS must be a positive integer");
  }
  return static_cast<int>(v);
}

// Runs fn(job) for job in [0, jobs). Parallelism never changes results:
// every job writes only to its own preassigned output slots.
template <typename Fn>
void parallel_for(std::size_t jobs, const Fn& fn) {
  int threads = env_thread_cap();
  if (threads == 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
  }
  threads = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(threads), jobs));
  if (threads <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) fn(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t j = next.fetch_add(1);
        if (j >= jobs) return;
        try {
          fn(j);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace detail

// Parses the versioned JSON experiment config. Missing fields take the
// documented desk-scale defaults; unknown methods fail here, before any
// simulation work starts.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != 1) {
    throw ConfigError("config requires \"schema_version\": 1");
  }
  const std::string exp = j.value("experiment", "");
  if (exp == "mean-comparison") {
    cfg.experiment = ExperimentKind::kMeanComparison;
  } else if (exp == "simple-ht") {
    cfg.experiment = ExperimentKind::kSimpleHt;
  } else if (exp == "one-sided-ht") {
    cfg.experiment = ExperimentKind::kOneSidedHt;
  } else if (exp == "two-sided-ht") {
    cfg.experiment = ExperimentKind::kTwoSidedHt;
  } else {
    throw ConfigError("unknown experiment '" + exp + "'");
  }

  cfg.replications = j.value("replications", 200);
  if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
  cfg.alpha = j.value("alpha", 0.05);
  cfg.mc_reps = j.value("mc_reps", 199);
  cfg.master_seed = j.value("master_seed", std::uint64_t{1});

  const std::string noise = j.value("noise_kind", "seeded");
  if (noise == "seeded") {
    cfg.noise_kind = NoiseSource::Kind::kSeeded;
  } else if (noise == "zero") {
    cfg.noise_kind = NoiseSource::Kind::kZero;
  } else {
    throw ConfigError("noise_kind must be 'seeded' or 'zero'");
  }

  if (j.contains("mean_params")) {
    const auto& mp = j["mean_params"];
    cfg.mean_params.v = mp.value("v", cfg.mean_params.v);
    cfg.mean_params.p = mp.value("p", cfg.mean_params.p);
    cfg.mean_params.eta = mp.value("eta", cfg.mean_params.eta);
    cfg.mean_params.k = mp.value("k", cfg.mean_params.k);
    if (mp.contains("prior_range")) {
      const auto& pr = mp["prior_range"];
      if (!pr.is_array() || pr.size() != 2) {
        throw ConfigError("mean_params.prior_range must be [lo, hi]");
      }
      cfg.mean_params.prior_range = {pr[0].get<double>(), pr[1].get<double>()};
    }
    cfg.mean_params.validate();
  }
  if (j.contains("ncllr_clamp")) {
    const auto& cl = j["ncllr_clamp"];
    if (!cl.is_array() || cl.size() != 2) {
      throw ConfigError("ncllr_clamp must be [lo, hi]");
    }
    cfg.ncllr_clamp = ClampRange{cl[0].get<double>(), cl[1].get<double>()};
    cfg.ncllr_clamp.validate();
  }

  const bool is_mean = cfg.experiment == ExperimentKind::kMeanComparison;
  if (j.contains("n_grid")) {
    for (const auto& v : j["n_grid"]) {
      cfg.n_grid.push_back(v.get<std::size_t>());
    }
  } else if (is_mean) {
    cfg.n_grid = {100, 316, 1000, 3162, 10000, 31623, 100000};
  } else {
    cfg.n_grid = {100, 200, 400, 800, 1600, 3200};
  }
  if (j.contains("eps_grid")) {
    for (const auto& v : j["eps_grid"]) cfg.eps_grid.push_back(v.get<double>());
  } else {
    cfg.eps_grid = {1.0};
  }
  if (cfg.n_grid.empty() || cfg.eps_grid.empty()) {
    throw ConfigError("n_grid and eps_grid must be non-empty");
  }

  switch (cfg.experiment) {
    case ExperimentKind::kMeanComparison: {
      std::vector<std::string> dists =
          j.value("distributions", std::vector<std::string>{
                                       "gamma(2,0.5)", "logistic(5,2)",
                                       "normal(3,1)"});
      for (const auto& d : dists) {
        Distribution dist = parse_distribution(d);
        cfg.cells.push_back({dist, to_string(dist)});
      }
      cfg.methods = j.value(
          "methods", std::vector<std::string>{"gdp-mean", "naive-dd",
                                              "nonprivate-mean"});
      break;
    }
    case ExperimentKind::kSimpleHt: {
      cfg.null_dist = parse_distribution(j.value("null", "t(1)"));
      cfg.alt_dist = parse_distribution(
          j.value("alt", "mixture(0.5:t(1),0.5:nct(1.1,0.1))"));
      std::vector<std::string> sources =
          j.value("data_from", std::vector<std::string>{"alt"});
      for (const auto& s : sources) {
        Distribution dist = (s == "null") ? *cfg.null_dist
                            : (s == "alt") ? *cfg.alt_dist
                                           : parse_distribution(s);
        cfg.cells.push_back({dist, to_string(dist)});
      }
      cfg.methods = j.value(
          "methods",
          std::vector<std::string>{"gdp-llr", "ncllr", "nonprivate-llr"});
      break;
    }
    case ExperimentKind::kOneSidedHt:
    case ExperimentKind::kTwoSidedHt: {
      const bool one_sided = cfg.experiment == ExperimentKind::kOneSidedHt;
      cfg.family = parse_distribution(
          j.value("family", one_sided ? "normal(0,1)" : "logistic(0,1)"));
      std::vector<double> thetas = j.value(
          "theta1_grid",
          one_sided ? std::vector<double>{0.1, 0.2, 0.5}
                    : std::vector<double>{-0.2, -0.1, -0.05, 0.05, 0.1, 0.2});
      for (double theta : thetas) {
        Distribution dist = detail::at_theta(*cfg.family, theta);
        cfg.cells.push_back({dist, to_string(dist)});
      }
      cfg.methods =
          j.value("methods", std::vector<std::string>{"gdp-llr",
                                                      "nonprivate-llr"});
      break;
    }
  }

  if (cfg.methods.empty()) throw ConfigError("methods must be non-empty");
  for (const auto& m : cfg.methods) {
    if (reserved_method_ids().count(m) != 0) {
      throw ConfigError("method id '" + m +
                        "' is reserved for an external baseline and is not "
                        "implemented");
    }
    const auto it = method_registry().find(m);
    if (it == method_registry().end()) {
      throw ConfigError("unknown method id '" + m + "'");
    }
    if (it->second.count(cfg.experiment) == 0) {
      throw ConfigError("method '" + m + "' does not support experiment '" +
                        experiment_name(cfg.experiment) + "'");
    }
  }
  return cfg;
}

inline ExperimentConfig parse_experiment_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return experiment_config_from_json(j);
}

namespace detail {

inline double run_mean_method(const std::string& method,
                              std::span<const double> data,
                              const PrivacyBudget& eps,
                              const ExperimentConfig& cfg, NoiseSource& mech) {
  if (method == "gdp-mean") {
    return gdp_mean_auto(data, eps, cfg.mean_params, mech).value;
  }
  if (method == "naive-dd") return naive_dd_mean(data, eps, mech).value;
  if (method == "nonprivate-mean") return nonprivate_mean(data);
  throw ConfigError("unknown mean method '" + method + "'");
}

inline bool run_test_method(const std::string& method,
                            std::span<const double> data,
                            const PrivacyBudget& eps,
                            const ExperimentConfig& cfg, NoiseSource& mech) {
  switch (cfg.experiment) {
    case ExperimentKind::kSimpleHt: {
      if (method == "gdp-llr") {
        TestSpec spec{SimpleHypothesis{*cfg.null_dist, *cfg.alt_dist},
                      cfg.alpha, cfg.mc_reps, eps, cfg.mean_params};
        return simple_test(data, spec, mech).reject;
      }
      if (method == "ncllr") {
        return ncllr_test(data, *cfg.null_dist, *cfg.alt_dist, cfg.ncllr_clamp,
                          eps, cfg.alpha, cfg.mc_reps, mech)
            .reject;
      }
      if (method == "nonprivate-llr") {
        return nonprivate_llr_test(data, *cfg.null_dist, *cfg.alt_dist,
                                   cfg.alpha, cfg.mc_reps, mech)
            .reject;
      }
      break;
    }
    case ExperimentKind::kOneSidedHt:
    case ExperimentKind::kTwoSidedHt: {
      const bool two_sided = cfg.experiment == ExperimentKind::kTwoSidedHt;
      if (method == "gdp-llr") {
        if (two_sided) {
          TestSpec spec{TwoSidedHypothesis{*cfg.family}, cfg.alpha,
                        cfg.mc_reps, eps, cfg.mean_params};
          return two_sided_test(data, spec, mech).reject;
        }
        TestSpec spec{OneSidedHypothesis{*cfg.family}, cfg.alpha, cfg.mc_reps,
                      eps, cfg.mean_params};
        return one_sided_test(data, spec, mech).reject;
      }
      if (method == "nonprivate-llr") {
        return nonprivate_mlr_test(data, *cfg.family, cfg.alpha, cfg.mc_reps,
                                   two_sided, mech)
            .reject;
      }
      break;
    }
    default:
      break;
  }
  throw ConfigError("method '" + method + "' is not valid here");
}

}  // namespace detail

// Full factorial sweep: cells x n_grid x eps_grid x methods x replications.
// Rows come back in that nested order. Replicates may run on any number of
// threads (capped by GDP_TESTKIT_THREADS); results are identical either
// way because every replicate derives its own noise streams from
// (master_seed, replicate, cell label) and writes to a preassigned slot.
// Methods sharing a (cell, n, eps, replicate) see the same generated data,
// which makes cross-method error comparisons paired.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  const bool is_mean = cfg.experiment == ExperimentKind::kMeanComparison;
  const std::string exp_name = experiment_name(cfg.experiment);
  const std::string metric = is_mean ? "abs_error" : "reject";

  const std::size_t n_cells = cfg.cells.size();
  const std::size_t n_ns = cfg.n_grid.size();
  const std::size_t n_eps = cfg.eps_grid.size();
  const std::size_t n_methods = cfg.methods.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t total = n_cells * n_ns * n_eps * n_methods * reps;

  std::vector<ResultRow> rows(total);

  // One job = one (cell, n, eps, replicate): the data is generated once and
  // every method consumes it.
  const std::size_t jobs = n_cells * n_ns * n_eps * reps;
  detail::parallel_for(jobs, [&](std::size_t job) {
    const std::size_t rep = job % reps;
    std::size_t rest = job / reps;
    const std::size_t ei = rest % n_eps;
    rest /= n_eps;
    const std::size_t ni = rest % n_ns;
    const std::size_t ci = rest / n_ns;

    const ExperimentCell& cell = cfg.cells[ci];
    const std::size_t n = cfg.n_grid[ni];
    const double eps_value = cfg.eps_grid[ei];
    const PrivacyBudget eps(eps_value);

    const std::string cell_key = exp_name + "/" + cell.label + "/" +
                                 std::to_string(n) + "/" +
                                 detail::format_double(eps_value);

    NoiseSource data_stream =
        NoiseSource::seeded(derive_seed(cfg.master_seed, rep, "data/" + cell_key));
    const Sample data = sample(cell.data_dist, n, data_stream);

    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      const std::string& method = cfg.methods[mi];
      NoiseSource mech =
          cfg.noise_kind == NoiseSource::Kind::kZero
              ? NoiseSource::zero()
              : NoiseSource::seeded(derive_seed(
                    cfg.master_seed, rep, "mech/" + method + "/" + cell_key));

      double value = 0.0;
      if (is_mean) {
        const double est =
            detail::run_mean_method(method, data, eps, cfg, mech);
        value = std::fabs(est - true_mean(cell.data_dist));
      } else {
        value = detail::run_test_method(method, data, eps, cfg, mech) ? 1.0
                                                                      : 0.0;
      }
      if (!std::isfinite(value)) {
        throw ConfigError("non-finite metric from method '" + method + "'");
      }

      const std::size_t row_index =
          (((ci * n_ns + ni) * n_eps + ei) * n_methods + mi) * reps + rep;
      rows[row_index] =
          ResultRow{exp_name, method,           cell.label,
                    n,        eps_value,        static_cast<int>(rep),
                    metric,   value};
    }
  });
  return rows;
}

// CSV schema, exact column order:
// experiment,method,distribution,n,epsilon,replicate,metric_name,metric_value
// UTF-8, LF line endings, shortest-round-trip decimal floats. Fields
// containing a comma (distribution specs) are double-quoted.
inline void write_csv(std::span<const ResultRow> rows, std::ostream& out) {
  out << "experiment,method,distribution,n,epsilon,replicate,metric_name,"
         "metric_value\n";
  for (const ResultRow& r : rows) {
    out << detail::csv_quote(r.experiment) << ',' << detail::csv_quote(r.method)
        << ',' << detail::csv_quote(r.distribution) << ',' << r.n << ','
        << detail::format_double(r.epsilon) << ',' << r.replicate << ','
        << detail::csv_quote(r.metric_name) << ','
        << detail::format_double(r.metric_value) << '\n';
  }
}

inline std::vector<ResultRow> read_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV input");
  if (line != "experiment,method,distribution,n,epsilon,replicate,metric_name,"
              "metric_value") {
    throw ConfigError("unexpected CSV header: " + line);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::csv_split(line);
    if (f.size() != 8) {
      throw ConfigError("CSV row has " + std::to_string(f.size()) +
                        " fields, expected 8: " + line);
    }
    ResultRow r;
    r.experiment = f[0];
    r.method = f[1];
    r.distribution = f[2];
    r.n = static_cast<std::size_t>(std::stoull(f[3]));
    r.epsilon = std::stod(f[4]);
    r.replicate = std::stoi(f[5]);
    r.metric_name = f[6];
    r.metric_value = std::stod(f[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

struct SummaryRow {
  std::vector<std::pair<std::string, std::string>> keys;  // (column, value)
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double se = 0.0;  // Monte Carlo standard error of the mean
};

// Groups rows by the requested key columns (subset of: experiment, method,
// distribution, n, epsilon, metric_name) and reports count, mean, median,
// and the MC standard error per group. For reject metrics the mean is the
// empirical power. Groups appear in first-occurrence order, which is the
// runner's deterministic grid order. Rows with non-finite metric values are
// dropped with a warning; a group losing all rows is omitted likewise.
inline std::vector<SummaryRow> summarize(std::span<const ResultRow> rows,
                                         const std::vector<std::string>& keys,
                                         std::ostream* warnings = nullptr) {
  for (const auto& k : keys) {
    if (k != "experiment" && k != "method" && k != "distribution" &&
        k != "n" && k != "epsilon" && k != "metric_name") {
      throw ConfigError("unknown group key '" + k + "'");
    }
  }
  if (keys.empty()) throw ConfigError("group keys must be non-empty");

  const auto key_value = [](const ResultRow& r,
                            const std::string& k) -> std::string {
    if (k == "experiment") return r.experiment;
    if (k == "method") return r.method;
    if (k == "distribution") return r.distribution;
    if (k == "n") return std::to_string(r.n);
    if (k == "epsilon") return detail::format_double(r.epsilon);
    return r.metric_name;
  };

  std::vector<SummaryRow> out;
  std::map<std::vector<std::string>, std::size_t> index;
  std::vector<std::vector<double>> values;
  for (const ResultRow& r : rows) {
    std::vector<std::string> tuple;
    tuple.reserve(keys.size());
    for (const auto& k : keys) tuple.push_back(key_value(r, k));
    if (!std::isfinite(r.metric_value)) {
      if (warnings != nullptr) {
        *warnings << "warning: dropping non-finite metric value in group";
        for (const auto& v : tuple) *warnings << ' ' << v;
        *warnings << '\n';
      }
      continue;
    }
    auto [it, inserted] = index.try_emplace(tuple, out.size());
    if (inserted) {
      SummaryRow s;
      for (std::size_t i = 0; i < keys.size(); ++i) {
        s.keys.emplace_back(keys[i], tuple[i]);
      }
      out.push_back(std::move(s));
      values.emplace_back();
    }
    values[it->second].push_back(r.metric_value);
  }

  std::vector<SummaryRow> kept;
  for (std::size_t g = 0; g < out.size(); ++g) {
    auto& vals = values[g];
    if (vals.empty()) {
      if (warnings != nullptr) {
        *warnings << "warning: omitting empty group\n";
      }
      continue;
    }
    SummaryRow s = std::move(out[g]);
    s.count = vals.size();
    double sum = 0.0;
    for (double v : vals) sum += v;
    s.mean = sum / static_cast<double>(vals.size());
    std::sort(vals.begin(), vals.end());
    const std::size_t mid = vals.size() / 2;
    s.median = (vals.size() % 2 == 1)
                   ? vals[mid]
                   : 0.5 * (vals[mid - 1] + vals[mid]);
    if (vals.size() > 1) {
      double ss = 0.0;
      for (double v : vals) ss += (v - s.mean) * (v - s.mean);
      const double sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
      s.se = sd / std::sqrt(static_cast<double>(vals.size()));
    }
    kept.push_back(std::move(s));
  }
  return kept;
}

inline void write_summary_csv(std::span<const SummaryRow> rows,
                              std::ostream& out) {
  if (rows.empty()) return;
  for (const auto& [col, _] : rows.front().keys) out << col << ',';
  out << "count,mean,median,se\n";
  for (const SummaryRow& r : rows) {
    for (const auto& [_, value] : r.keys) out << detail::csv_quote(value) << ',';
    out << r.count << ',' << detail::format_double(r.mean) << ','
        << detail::format_double(r.median) << ',' << detail::format_double(r.se)
        << '\n';
  }
}

}  // namespace gdptest

#endif  // GDPTEST_BENCH_HPP
