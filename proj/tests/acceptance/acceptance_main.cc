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

// End-to-end acceptance suite. Each criterion runs at full scale with fixed
// seeds and prints one pass/fail line; the process exit code is the number
// of failures. `--only N` runs a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gdptest/baselines.hpp"
#include "gdptest/bench.hpp"
#include "gdptest/budget.hpp"
#include "gdptest/distribution.hpp"
#include "gdptest/hypothesis.hpp"
#include "gdptest/mean.hpp"
#include "gdptest/noise.hpp"
#include "gdptest/quantile.hpp"

#include "../test_util.h"

namespace {

using namespace gdptest;
using gdptest_tests::median_of;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---- C1: budget identities -------------------------------------------------

Outcome budget_identities() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> eps_gen(0.1, 10.0);
  std::uniform_real_distribution<double> k_gen(0.05, 1.0);
  std::uniform_int_distribution<std::size_t> n_gen(10, 1000000);
  double worst = 0.0;
  int checked = 0;
  while (checked < 1000) {
    const double eps = eps_gen(rng);
    const double k = k_gen(rng);
    const std::size_t n = n_gen(rng);
    if (std::pow(std::log(static_cast<double>(n)), 2.0 * k) <= 2.0) continue;
    const BudgetSplit s = split_budget(eps, n, k);
    const double q = s.eps_q.epsilon();
    const double m = s.eps_m.epsilon();
    const double identity =
        std::fabs(2.0 * q * q + m * m - eps * eps) / (eps * eps);
    const double round_trip =
        std::fabs(compose({s.eps_q, s.eps_q, s.eps_m}).epsilon() - eps) / eps;
    worst = std::max({worst, identity, round_trip});
    if (!(q > 0.0 && q < eps && m > 0.0 && m < eps)) {
      return {false, "split bounds violated"};
    }
    ++checked;
  }
  // Mechanism audit trails must compose to the total budget too.
  NoiseSource root = NoiseSource::seeded(202);
  for (int rep = 0; rep < 50; ++rep) {
    NoiseSource data_stream = root.derive("data", rep);
    const Sample data = sample(Distribution::normal(0, 2), 500, data_stream);
    const double eps = 0.25 + 0.11 * rep;
    NoiseSource mech = root.derive("mech", rep);
    const MeanEstimate est =
        gdp_mean_auto(data, PrivacyBudget(eps), MeanEstParams{}, mech);
    double sum_sq = 0.0;
    for (const AuditEntry& e : est.audit) sum_sq += e.epsilon * e.epsilon;
    worst = std::max(worst, std::fabs(sum_sq - eps * eps) / (eps * eps));
  }
  std::ostringstream detail;
  detail << "max relative deviation " << worst;
  return {worst <= 1e-12, detail.str()};
}

// ---- C2: probabilistic rank-error guarantee --------------------------------

Outcome rank_error_guarantee() {
  const int reps = 2000;
  const int steps = 20;
  const double tau = rank_error_bound(steps, PrivacyBudget(1.0), 0.05);
  std::vector<int> ok(reps, 0);
  detail::parallel_for(reps, [&](std::size_t rep) {
    NoiseSource data_stream =
        NoiseSource::seeded(derive_seed(301, rep, "data"));
    std::vector<double> data(1000);
    for (double& x : data) x = data_stream.next_uniform();
    NoiseSource mech = NoiseSource::seeded(derive_seed(301, rep, "mech"));
    const QuantileConfig cfg{0.0, 1.0, steps, 0.5, PrivacyBudget(1.0), 0.05};
    const QuantileResult res = gdp_quant(data, cfg, mech);
    ok[rep] =
        static_cast<double>(rank_error(data, res.value, 0.5)) <= tau + 1.0;
  });
  const double frac =
      std::accumulate(ok.begin(), ok.end(), 0) / static_cast<double>(reps);
  std::ostringstream detail;
  detail << "fraction within tau+1 = " << frac << " (tau = " << tau << ")";
  return {frac >= 0.93, detail.str()};
}

// ---- C3: deterministic rank-error lemma ------------------------------------

Outcome deterministic_rank_error() {
  std::mt19937_64 rng(401);
  std::uniform_int_distribution<int> steps_gen(6, 16);
  std::uniform_real_distribution<double> tau_gen(0.5, 20.0);
  int failures = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int steps = steps_gen(rng);
    // Keep n well below the bin count so sampling distinct bins terminates.
    const std::size_t max_n = std::min<std::size_t>(
        100, (static_cast<std::size_t>(1) << steps) / 4);
    const std::size_t n =
        std::uniform_int_distribution<std::size_t>(4, max_n)(rng);
    const auto data =
        gdptest_tests::distinct_bin_dataset(rng, -1.0, 2.0, steps, n);
    const std::size_t m =
        std::uniform_int_distribution<std::size_t>(1, n - 1)(rng);
    const double q = static_cast<double>(m) / static_cast<double>(n);
    const double tau = tau_gen(rng);
    // Every injected noise value lies strictly inside (-tau, tau), which
    // satisfies the one-sided condition regardless of the true direction.
    const double per_step_sd = std::sqrt(static_cast<double>(steps));
    std::uniform_real_distribution<double> z_gen(-0.999 * tau, 0.999 * tau);
    std::vector<double> script(steps);
    for (double& z : script) z = z_gen(rng) / per_step_sd;
    NoiseSource noise = NoiseSource::scripted(script);
    const QuantileConfig cfg{-1.0, 2.0, steps, q, PrivacyBudget(1.0)};
    const QuantileResult res = gdp_quant(data, cfg, noise);
    if (static_cast<double>(rank_error(data, res.value, q)) > tau + 1.0) {
      ++failures;
    }
  }
  std::ostringstream detail;
  detail << failures << " of 1000 cases exceeded tau+1";
  return {failures == 0, detail.str()};
}

// ---- C4: mean-estimator error decay ----------------------------------------

Outcome mean_error_decay() {
  const std::vector<std::size_t> ns = {1000, 3162, 10000, 31623, 100000};
  const int reps = 200;
  std::vector<double> log_n;
  std::vector<double> log_med;
  std::ostringstream detail;
  detail.setf(std::ios::fixed);
  detail.precision(4);
  for (std::size_t n : ns) {
    std::vector<double> err(reps);
    detail::parallel_for(reps, [&](std::size_t rep) {
      NoiseSource data_stream = NoiseSource::seeded(
          derive_seed(501, rep, "data/" + std::to_string(n)));
      const Sample data = sample(Distribution::normal(3, 1), n, data_stream);
      NoiseSource mech = NoiseSource::seeded(
          derive_seed(501, rep, "mech/" + std::to_string(n)));
      const MeanEstimate est =
          gdp_mean_auto(data, PrivacyBudget(1.0), MeanEstParams{}, mech);
      err[rep] = std::fabs(est.value - gdptest_tests::mean_of(data));
    });
    const double med = median_of(err);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_med.push_back(std::log(med));
  }
  // Least-squares slope of log(median error) on log(n).
  const double mx = gdptest_tests::mean_of(log_n);
  const double my = gdptest_tests::mean_of(log_med);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    sxy += (log_n[i] - mx) * (log_med[i] - my);
    sxx += (log_n[i] - mx) * (log_n[i] - mx);
  }
  const double slope = sxy / sxx;
  detail << "log-log slope " << slope;
  return {slope >= -1.25 && slope <= -0.75, detail.str()};
}

// ---- C5: asymptotic normality ----------------------------------------------

Outcome asymptotic_normality() {
  const int reps = 500;
  const std::size_t n = 10000;
  std::vector<double> standardized(reps);
  detail::parallel_for(reps, [&](std::size_t rep) {
    NoiseSource data_stream = NoiseSource::seeded(derive_seed(601, rep, "data"));
    const Sample data = sample(Distribution::normal(0, 1), n, data_stream);
    NoiseSource mech = NoiseSource::seeded(derive_seed(601, rep, "mech"));
    const MeanEstimate est =
        gdp_mean_auto(data, PrivacyBudget(1.0), MeanEstParams{}, mech);
    standardized[rep] = std::sqrt(static_cast<double>(n)) * est.value;
  });
  const double d = gdptest_tests::ks_statistic_vs_std_normal(standardized);
  const double p =
      gdptest_tests::kolmogorov_q(std::sqrt(static_cast<double>(reps)) * d);
  std::ostringstream detail;
  detail << "KS D = " << d << ", p = " << p;
  return {p > 0.01, detail.str()};
}

// ---- C6: mean-comparison ordering ------------------------------------------

// Error is measured against the sample mean: both estimators target it,
// and differencing out the sampling error shared by the paired replicates
// compares the mechanisms rather than the common data draw.
Outcome mean_comparison_ordering() {
  const std::vector<std::string> dists = {"gamma(2,0.5)", "logistic(5,2)",
                                          "normal(3,1)"};
  const std::vector<std::size_t> ns = {1000, 10000};
  const int reps = 200;
  bool all_ordered = true;
  std::ostringstream detail;
  detail.setf(std::ios::scientific);
  detail.precision(2);
  for (const std::string& spec : dists) {
    const Distribution dist = parse_distribution(spec);
    for (std::size_t n : ns) {
      std::vector<double> err_gdp(reps), err_naive(reps);
      detail::parallel_for(reps, [&](std::size_t rep) {
        const std::string key = spec + "/" + std::to_string(n);
        NoiseSource data_stream =
            NoiseSource::seeded(derive_seed(701, rep, "data/" + key));
        const Sample data = sample(dist, n, data_stream);
        const double sample_mean = gdptest_tests::mean_of(data);
        NoiseSource m1 =
            NoiseSource::seeded(derive_seed(701, rep, "gdp/" + key));
        NoiseSource m2 =
            NoiseSource::seeded(derive_seed(701, rep, "naive/" + key));
        err_gdp[rep] = std::fabs(
            gdp_mean_auto(data, PrivacyBudget(1.0), MeanEstParams{}, m1).value -
            sample_mean);
        err_naive[rep] = std::fabs(
            naive_dd_mean(data, PrivacyBudget(1.0), m2).value - sample_mean);
      });
      const double med_gdp = median_of(err_gdp);
      const double med_naive = median_of(err_naive);
      if (!(med_gdp < med_naive)) all_ordered = false;
      detail << " [" << spec << ", n=" << n << ": " << med_gdp << " vs "
             << med_naive << "]";
    }
  }
  return {all_ordered, detail.str()};
}

// ---- C7: conservative type I error -----------------------------------------

Outcome conservative_type_i() {
  const int reps = 1000;
  const int mc_reps = 199;
  const double alpha = 0.05;
  const std::size_t n = 400;
  const double limit = 0.071;  // alpha + 3 binomial standard errors

  const Distribution t1 = parse_distribution("t(1)");
  const Distribution mix =
      parse_distribution("mixture(0.5:t(1),0.5:nct(1.1,0.1))");
  const Distribution n01 = Distribution::normal(0, 1);
  const Distribution l01 = Distribution::logistic(0, 1);

  struct Case {
    std::string name;
    Distribution null_data;
    std::function<TestVerdict(const Sample&, NoiseSource&)> run;
  };
  const std::vector<Case> cases = {
      {"simple", t1,
       [&](const Sample& d, NoiseSource& ns) {
         TestSpec spec{SimpleHypothesis{t1, mix}, alpha, mc_reps,
                       PrivacyBudget(1.0), MeanEstParams{}};
         return simple_test(d, spec, ns);
       }},
      {"one-sided", n01,
       [&](const Sample& d, NoiseSource& ns) {
         TestSpec spec{OneSidedHypothesis{n01}, alpha, mc_reps,
                       PrivacyBudget(1.0), MeanEstParams{}};
         return one_sided_test(d, spec, ns);
       }},
      {"two-sided", l01,
       [&](const Sample& d, NoiseSource& ns) {
         TestSpec spec{TwoSidedHypothesis{l01}, alpha, mc_reps,
                       PrivacyBudget(1.0), MeanEstParams{}};
         return two_sided_test(d, spec, ns);
       }},
  };

  bool all_pass = true;
  std::ostringstream detail;
  for (const Case& c : cases) {
    std::vector<double> pvals(reps);
    detail::parallel_for(reps, [&](std::size_t rep) {
      NoiseSource data_stream =
          NoiseSource::seeded(derive_seed(801, rep, "data/" + c.name));
      const Sample data = sample(c.null_data, n, data_stream);
      NoiseSource mech =
          NoiseSource::seeded(derive_seed(801, rep, "mech/" + c.name));
      pvals[rep] = c.run(data, mech).p_value;
    });
    const auto frac_at_most = [&](double u) {
      int count = 0;
      for (double p : pvals) {
        if (p <= u) ++count;
      }
      return count / static_cast<double>(reps);
    };
    const double rate = frac_at_most(alpha);
    if (rate > limit) all_pass = false;
    // p-value validity at the companion thresholds.
    for (double u : {0.01, 0.05, 0.1}) {
      const double bound = u + 3.0 * std::sqrt(u * (1.0 - u) / reps);
      if (frac_at_most(u) > bound) all_pass = false;
    }
    detail << " [" << c.name << ": " << rate << "]";
  }
  return {all_pass, detail.str()};
}

// ---- C8: simple-test power vs fixed-clamp baseline -------------------------

Outcome simple_power_ordering() {
  const int reps = 300;
  const int mc_reps = 199;
  const Distribution t1 = parse_distribution("t(1)");
  const Distribution mix =
      parse_distribution("mixture(0.5:t(1),0.5:nct(1.1,0.1))");
  const ClampRange clamp{-2.0, 2.0};
  bool all_pass = true;
  std::ostringstream detail;
  for (std::size_t n : {800u, 1600u, 3200u}) {
    std::vector<double> gdp_reject(reps), nc_reject(reps);
    detail::parallel_for(reps, [&](std::size_t rep) {
      const std::string key = std::to_string(n);
      NoiseSource data_stream =
          NoiseSource::seeded(derive_seed(901, rep, "data/" + key));
      const Sample data = sample(mix, n, data_stream);
      NoiseSource m1 = NoiseSource::seeded(derive_seed(901, rep, "gdp/" + key));
      TestSpec spec{SimpleHypothesis{t1, mix}, 0.05, mc_reps,
                    PrivacyBudget(1.0), MeanEstParams{}};
      gdp_reject[rep] = simple_test(data, spec, m1).reject ? 1.0 : 0.0;
      NoiseSource m2 = NoiseSource::seeded(derive_seed(901, rep, "nc/" + key));
      nc_reject[rep] = ncllr_test(data, t1, mix, clamp, PrivacyBudget(1.0),
                                  0.05, mc_reps, m2)
                               .reject
                           ? 1.0
                           : 0.0;
    });
    const double power_gdp = gdptest_tests::mean_of(gdp_reject);
    const double power_nc = gdptest_tests::mean_of(nc_reject);
    if (!(power_gdp >= power_nc - 0.03)) all_pass = false;
    detail << " [n=" << n << ": " << power_gdp << " vs " << power_nc << "]";
  }
  return {all_pass, detail.str()};
}

// ---- C9: proximity to the non-private test ---------------------------------

Outcome two_sided_power_proximity() {
  const int reps = 300;
  const int mc_reps = 199;
  const std::size_t n = 1600;
  const Distribution l01 = Distribution::logistic(0, 1);
  const Distribution alt = Distribution::logistic(0.2, 1);
  std::vector<double> dp_reject(reps), np_reject(reps);
  detail::parallel_for(reps, [&](std::size_t rep) {
    NoiseSource data_stream =
        NoiseSource::seeded(derive_seed(1001, rep, "data"));
    const Sample data = sample(alt, n, data_stream);
    NoiseSource m1 = NoiseSource::seeded(derive_seed(1001, rep, "dp"));
    TestSpec spec{TwoSidedHypothesis{l01}, 0.05, mc_reps, PrivacyBudget(1.0),
                  MeanEstParams{}};
    dp_reject[rep] = two_sided_test(data, spec, m1).reject ? 1.0 : 0.0;
    NoiseSource m2 = NoiseSource::seeded(derive_seed(1001, rep, "np"));
    np_reject[rep] =
        nonprivate_mlr_test(data, l01, 0.05, mc_reps, /*two_sided=*/true, m2)
                .reject
            ? 1.0
            : 0.0;
  });
  const double dp_power = gdptest_tests::mean_of(dp_reject);
  const double np_power = gdptest_tests::mean_of(np_reject);
  std::ostringstream detail;
  detail << "DP power " << dp_power << ", non-private " << np_power;
  return {dp_power >= np_power - 0.15, detail.str()};
}

// ---- C10: byte-identical reruns --------------------------------------------

Outcome rerun_determinism() {
  const std::string config = R"json({
    "schema_version": 1,
    "experiment": "mean-comparison",
    "methods": ["gdp-mean", "naive-dd", "nonprivate-mean"],
    "distributions": ["normal(3,1)", "gamma(2,0.5)"],
    "n_grid": [100, 1000],
    "eps_grid": [0.5, 1],
    "replications": 20,
    "master_seed": 20260808
  })json";
  const ExperimentConfig cfg = parse_experiment_config(config);
  std::ostringstream first, second;
  write_csv(run_experiment(cfg), first);
  write_csv(run_experiment(cfg), second);
  const bool same = first.str() == second.str();
  std::ostringstream detail;
  detail << first.str().size() << " bytes"
         << (same ? ", identical" : ", DIFFER");
  return {same, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
    }
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "budget identities compose to 1e-12", budget_identities},
      {2, "rank error within tau+1 in >= 93% of seeded runs",
       rank_error_guarantee},
      {3, "deterministic rank-error bound under scripted noise",
       deterministic_rank_error},
      {4, "mean-estimator error decays with log-log slope in [-1.25,-0.75]",
       mean_error_decay},
      {5, "standardized estimates pass KS against N(0,1) at 1%",
       asymptotic_normality},
      {6, "adaptive mean beats naive growing clamp on all three designs",
       mean_comparison_ordering},
      {7, "type I error at most 0.071 for all three tests",
       conservative_type_i},
      {8, "simple-test power within 0.03 of/above fixed-clamp baseline",
       simple_power_ordering},
      {9, "two-sided power within 0.15 of the non-private test",
       two_sided_power_proximity},
      {10, "bench rerun produces byte-identical CSV", rerun_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] C%-2d %s (%.1fs) %s\n", outcome.pass ? "PASS" : "FAIL",
                c.id, c.name, secs, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures;
}
