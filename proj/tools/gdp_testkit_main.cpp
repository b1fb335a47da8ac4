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

// Command-line front end: `quantile`, `mean`, and `test` run one mechanism
// on a data file (one float per line); `bench run` / `bench summarize`
// drive the simulation harness. Every subcommand takes a --seed; the CLI
// constructs seeded noise only, so the test-only zero/scripted noise kinds
// are not reachable from a released run.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gdptest/baselines.hpp"
#include "gdptest/bench.hpp"
#include "gdptest/budget.hpp"
#include "gdptest/distribution.hpp"
#include "gdptest/hypothesis.hpp"
#include "gdptest/mean.hpp"
#include "gdptest/noise.hpp"
#include "gdptest/quantile.hpp"

namespace {

using nlohmann::json;

std::vector<double> read_input_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw gdptest::ConfigError("cannot open input file: " + path);
  std::vector<double> data;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = gdptest::detail::trim(line);
    if (sv.empty()) continue;
    try {
      data.push_back(gdptest::detail::parse_double(sv));
    } catch (const gdptest::ConfigError&) {
      throw gdptest::DataError("input file " + path + " line " +
                               std::to_string(line_no) +
                               " is not a number: " + line);
    }
  }
  if (data.empty()) throw gdptest::DataError("input file " + path + " is empty");
  return data;
}

std::pair<double, double> parse_pair(const std::string& text,
                                     const std::string& what) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw gdptest::ConfigError(what + " must be two comma-separated numbers");
  }
  return {gdptest::detail::parse_double(
              gdptest::detail::trim(text.substr(0, comma))),
          gdptest::detail::parse_double(
              gdptest::detail::trim(text.substr(comma + 1)))};
}

struct MeanParamFlags {
  double v = 1.0;
  double p = 1.1;
  double eta = 2.5;
  double k = 0.5;
  std::string prior_range;

  void attach(CLI::App* cmd) {
    cmd->add_option("--v", v, "search range scale (v > 0)");
    cmd->add_option("--p", p, "search range log-exponent (p > 1)");
    cmd->add_option("--eta", eta, "bin resolution exponent (eta > 2)");
    cmd->add_option("--k", k, "budget split exponent (0 < k <= 1)");
    cmd->add_option("--prior-range", prior_range,
                    "prior mean range lo,hi to center the search on");
  }

  gdptest::MeanEstParams resolve() const {
    gdptest::MeanEstParams params{v, p, eta, k, std::nullopt};
    if (!prior_range.empty()) {
      params.prior_range = parse_pair(prior_range, "--prior-range");
    }
    params.validate();
    return params;
  }
};

json audit_json(const std::vector<gdptest::AuditEntry>& audit) {
  json arr = json::array();
  for (const auto& e : audit) {
    arr.push_back({{"label", e.label},
                   {"epsilon", e.epsilon},
                   {"noise_sd", e.noise_sd}});
  }
  return arr;
}

int run_quantile(const std::string& input, const std::string& range, int steps,
                 double level, double epsilon, double beta, std::uint64_t seed,
                 bool as_json) {
  const auto [a, b] = parse_pair(range, "--range");
  const std::vector<double> data = read_input_file(input);
  gdptest::QuantileConfig cfg{a, b, steps, level, gdptest::PrivacyBudget(epsilon),
                              beta};
  gdptest::NoiseSource noise = gdptest::NoiseSource::seeded(seed);
  const gdptest::QuantileResult res = gdptest::gdp_quant(data, cfg, noise);
  if (as_json) {
    json out{{"value", res.value},
             {"bin_width", res.bin_width},
             {"tau", res.tau},
             {"steps", res.steps_taken},
             {"noise_sd_per_step", res.noise_sd_per_step},
             {"epsilon", res.epsilon}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "value=" << gdptest::detail::format_double(res.value)
              << " bin_width=" << gdptest::detail::format_double(res.bin_width)
              << " tau=" << gdptest::detail::format_double(res.tau)
              << " steps=" << res.steps_taken << " epsilon="
              << gdptest::detail::format_double(res.epsilon) << "\n";
  }
  return 0;
}

int run_mean(const std::string& input, double epsilon,
             const MeanParamFlags& flags, std::uint64_t seed, bool as_json) {
  const std::vector<double> data = read_input_file(input);
  gdptest::NoiseSource noise = gdptest::NoiseSource::seeded(seed);
  const gdptest::MeanEstimate est = gdptest::gdp_mean_auto(
      data, gdptest::PrivacyBudget(epsilon), flags.resolve(), noise);
  if (as_json) {
    json out{{"value", est.value},
             {"clamp_lo", est.clamp_lo},
             {"clamp_hi", est.clamp_hi},
             {"noise_sd", est.noise_sd},
             {"audit", audit_json(est.audit)}};
    if (est.config) {
      out["config"] = {{"n", est.config->n},
                       {"a", est.config->a},
                       {"b", est.config->b},
                       {"steps", est.config->steps},
                       {"q_lower", est.config->q_lower},
                       {"q_upper", est.config->q_upper},
                       {"tau", est.config->tau},
                       {"eps_q", est.config->split.eps_q.epsilon()},
                       {"eps_m", est.config->split.eps_m.epsilon()},
                       {"trim_fallback_applied",
                        est.config->trim_fallback_applied}};
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "value=" << gdptest::detail::format_double(est.value)
              << " clamp_lo=" << gdptest::detail::format_double(est.clamp_lo)
              << " clamp_hi=" << gdptest::detail::format_double(est.clamp_hi)
              << " noise_sd=" << gdptest::detail::format_double(est.noise_sd)
              << " trim_fallback="
              << (est.config && est.config->trim_fallback_applied ? 1 : 0)
              << "\n";
  }
  return 0;
}

int run_test(const std::string& kind, const std::string& input,
             const std::string& null_spec, const std::string& alt_spec,
             const std::string& family_spec, std::optional<double> theta0,
             double alpha, int mc_reps, double epsilon,
             const MeanParamFlags& flags, std::uint64_t seed, bool as_json) {
  const std::vector<double> data = read_input_file(input);
  gdptest::NoiseSource noise = gdptest::NoiseSource::seeded(seed);
  const gdptest::PrivacyBudget eps(epsilon);
  const gdptest::MeanEstParams params = flags.resolve();

  gdptest::TestVerdict verdict;
  if (kind == "simple") {
    if (null_spec.empty() || alt_spec.empty()) {
      throw gdptest::ConfigError("simple test requires --null and --alt");
    }
    gdptest::TestSpec spec{
        gdptest::SimpleHypothesis{gdptest::parse_distribution(null_spec),
                                  gdptest::parse_distribution(alt_spec)},
        alpha, mc_reps, eps, params};
    verdict = gdptest::simple_test(data, spec, noise);
  } else if (kind == "one-sided" || kind == "two-sided") {
    if (family_spec.empty()) {
      throw gdptest::ConfigError(kind + " test requires --family");
    }
    gdptest::Distribution null_dist = gdptest::parse_distribution(family_spec);
    if (theta0) null_dist = gdptest::detail::at_theta(null_dist, *theta0);
    if (kind == "one-sided") {
      gdptest::TestSpec spec{gdptest::OneSidedHypothesis{null_dist}, alpha,
                             mc_reps, eps, params};
      verdict = gdptest::one_sided_test(data, spec, noise);
    } else {
      gdptest::TestSpec spec{gdptest::TwoSidedHypothesis{null_dist}, alpha,
                             mc_reps, eps, params};
      verdict = gdptest::two_sided_test(data, spec, noise);
    }
  } else {
    throw gdptest::ConfigError(
        "--kind must be simple, one-sided, or two-sided");
  }

  std::cout << "kind=" << kind << " statistic="
            << gdptest::detail::format_double(verdict.statistic)
            << " p_value=" << gdptest::detail::format_double(verdict.p_value)
            << " reject=" << (verdict.reject ? 1 : 0)
            << " M=" << verdict.mc_reps_used << " alpha="
            << gdptest::detail::format_double(alpha) << " epsilon="
            << gdptest::detail::format_double(epsilon) << "\n";
  if (as_json) {
    json out{{"kind", kind},
             {"statistic", verdict.statistic},
             {"p_value", verdict.p_value},
             {"reject", verdict.reject},
             {"mc_reps", verdict.mc_reps_used},
             {"alpha", alpha},
             {"epsilon", epsilon}};
    if (verdict.tails) {
      out["p_lower"] = verdict.tails->first;
      out["p_upper"] = verdict.tails->second;
    }
    std::cout << out.dump(2) << "\n";
  }
  return 0;
}

int run_bench_run(const std::string& config_path, const std::string& out_path,
                  int replications_override,
                  std::optional<std::uint64_t> seed_override) {
  std::ifstream in(config_path);
  if (!in) {
    throw gdptest::ConfigError("cannot open config file: " + config_path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  gdptest::ExperimentConfig cfg =
      gdptest::parse_experiment_config(buffer.str());
  if (replications_override > 0) cfg.replications = replications_override;
  if (seed_override) cfg.master_seed = *seed_override;
  if (cfg.noise_kind != gdptest::NoiseSource::Kind::kSeeded) {
    throw gdptest::ConfigError(
        "noise_kind '" +
        std::string(cfg.noise_kind == gdptest::NoiseSource::Kind::kZero
                        ? "zero"
                        : "scripted") +
        "' is test-only and rejected on the release path; use a seeded run");
  }
  const std::vector<gdptest::ResultRow> rows = gdptest::run_experiment(cfg);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw gdptest::ConfigError("cannot open output file: " + out_path);
  gdptest::write_csv(rows, out);
  std::cerr << "wrote " << rows.size() << " rows to " << out_path << "\n";
  return 0;
}

int run_bench_summarize(const std::string& in_path, const std::string& group,
                        const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw gdptest::ConfigError("cannot open results file: " + in_path);
  const std::vector<gdptest::ResultRow> rows = gdptest::read_csv(in);

  std::vector<std::string> keys;
  for (auto part : gdptest::detail::split_top_level(group, ',')) {
    keys.emplace_back(gdptest::detail::trim(part));
  }
  const auto summary = gdptest::summarize(rows, keys, &std::cerr);
  if (out_path.empty()) {
    gdptest::write_summary_csv(summary, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      throw gdptest::ConfigError("cannot open output file: " + out_path);
    }
    gdptest::write_summary_csv(summary, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-DP quantile, mean, and hypothesis-test toolkit"};
  app.require_subcommand(1);

  // quantile
  auto* quantile = app.add_subcommand(
      "quantile", "private quantile by noisy binary search");
  std::string q_input, q_range;
  int q_steps = 16;
  double q_level = 0.5, q_eps = 1.0, q_beta = 0.05;
  std::uint64_t q_seed = 1;
  bool q_json = false;
  quantile->add_option("--input", q_input, "data file, one float per line")
      ->required();
  quantile->add_option("--range", q_range, "search range a,b")->required();
  quantile->add_option("--steps", q_steps, "number of halvings T");
  quantile->add_option("--level", q_level, "target quantile level in (0,1)");
  quantile->add_option("--epsilon", q_eps, "GDP budget")->required();
  quantile->add_option("--beta", q_beta, "failure probability for tau");
  quantile->add_option("--seed", q_seed, "noise seed");
  quantile->add_flag("--json", q_json, "emit JSON detail");

  // mean
  auto* mean = app.add_subcommand("mean", "private mean with adaptive clamps");
  std::string m_input;
  double m_eps = 1.0;
  std::uint64_t m_seed = 1;
  bool m_json = false;
  MeanParamFlags m_flags;
  mean->add_option("--input", m_input, "data file, one float per line")
      ->required();
  mean->add_option("--epsilon", m_eps, "GDP budget")->required();
  m_flags.attach(mean);
  mean->add_option("--seed", m_seed, "noise seed");
  mean->add_flag("--json", m_json, "emit JSON detail");

  // test
  auto* test = app.add_subcommand("test", "private hypothesis test");
  std::string t_kind, t_input, t_null, t_alt, t_family;
  double t_alpha = 0.05, t_eps = 1.0;
  int t_mc = 199;
  std::uint64_t t_seed = 1;
  bool t_json = false;
  std::optional<double> t_theta0;
  double t_theta0_value = 0.0;
  MeanParamFlags t_flags;
  test->add_option("--kind", t_kind, "simple | one-sided | two-sided")
      ->required();
  test->add_option("--input", t_input, "data file, one float per line")
      ->required();
  test->add_option("--null", t_null, "null distribution (simple)");
  test->add_option("--alt", t_alt, "alternative distribution (simple)");
  test->add_option("--family", t_family,
                   "MLR family at theta0 (one-sided / two-sided)");
  auto* theta0_opt =
      test->add_option("--theta0", t_theta0_value,
                       "override the family's free parameter with theta0");
  test->add_option("--alpha", t_alpha, "test level");
  test->add_option("--mc-reps", t_mc, "Monte Carlo null replicates M");
  test->add_option("--epsilon", t_eps, "GDP budget")->required();
  t_flags.attach(test);
  test->add_option("--seed", t_seed, "noise seed");
  test->add_flag("--json", t_json, "emit JSON detail");

  // bench
  auto* bench = app.add_subcommand("bench", "simulation harness");
  bench->require_subcommand(1);
  auto* bench_run = bench->add_subcommand("run", "run an experiment config");
  std::string b_config, b_out;
  int b_reps = 0;
  std::uint64_t b_seed_value = 0;
  bench_run->add_option("--config", b_config, "experiment config JSON")
      ->required();
  bench_run->add_option("--out", b_out, "output CSV path")->required();
  bench_run->add_option("--replications", b_reps,
                        "override the config's replication count");
  auto* b_seed_opt = bench_run->add_option(
      "--seed", b_seed_value, "override the config's master seed");
  auto* bench_sum =
      bench->add_subcommand("summarize", "aggregate a results CSV");
  std::string s_in, s_group = "method,n,epsilon", s_out;
  bench_sum->add_option("--in", s_in, "results CSV path")->required();
  bench_sum->add_option("--group", s_group, "comma-separated group keys");
  bench_sum->add_option("--out", s_out, "summary CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (quantile->parsed()) {
      return run_quantile(q_input, q_range, q_steps, q_level, q_eps, q_beta,
                          q_seed, q_json);
    }
    if (mean->parsed()) {
      return run_mean(m_input, m_eps, m_flags, m_seed, m_json);
    }
    if (test->parsed()) {
      if (theta0_opt->count() > 0) t_theta0 = t_theta0_value;
      return run_test(t_kind, t_input, t_null, t_alt, t_family, t_theta0,
                      t_alpha, t_mc, t_eps, t_flags, t_seed, t_json);
    }
    if (bench->parsed()) {
      if (bench_run->parsed()) {
        std::optional<std::uint64_t> seed;
        if (b_seed_opt->count() > 0) seed = b_seed_value;
        return run_bench_run(b_config, b_out, b_reps, seed);
      }
      if (bench_sum->parsed()) return run_bench_summarize(s_in, s_group, s_out);
    }
  } catch (const gdptest::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const gdptest::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
