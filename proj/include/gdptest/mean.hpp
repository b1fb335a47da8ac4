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

#ifndef GDPTEST_MEAN_HPP
#define GDPTEST_MEAN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gdptest/budget.hpp"
#include "gdptest/error.hpp"
#include "gdptest/noise.hpp"
#include "gdptest/quantile.hpp"

namespace gdptest {

// Tuning constants for the adaptive mean estimator. The search range grows
// like v*(log n)^p around an optional prior range for the mean, the bin
// resolution like n^-eta, and the budget split exponent k controls how much
// of eps the two tail-quantile searches consume. Defaults are the mildest
// values satisfying the constraints (p > 1, eta > 2, k in (0,1]).
struct MeanEstParams {
  double v = 1.0;
  double p = 1.1;
  double eta = 2.5;
  double k = 0.5;
  std::optional<std::pair<double, double>> prior_range;

  void validate() const {
    if (!(v > 0.0)) throw ConfigError("mean params require v > 0");
    if (!(p > 1.0)) throw ConfigError("mean params require p > 1");
    if (!(eta > 2.0)) throw ConfigError("mean params require eta > 2");
    if (!(k > 0.0) || k > 1.0) throw ConfigError("mean params require k in (0,1]");
    if (prior_range && !(prior_range->first <= prior_range->second)) {
      throw ConfigError("prior range requires lo <= hi");
    }
  }
};

// Fully derived run configuration: everything the estimator will do to a
// dataset of size n, before seeing the data.
struct DerivedMeanConfig {
  std::size_t n;
  double a;                   // search lower bound
  double b;                   // search upper bound
  int steps;                  // T = ceil(log2((b-a) n^eta))
  double q_lower;             // lower-tail level (tau+2)/n
  double q_upper;             // upper-tail level 1-(tau+1)/n
  BudgetSplit split;
  double tau;                 // rank-error bound at failure prob n^{2-eta}
  double quantile_beta;       // n^{2-eta}, reported through the sub-calls
  bool trim_fallback_applied;
};

// One budgeted release recorded while a mechanism runs.
struct AuditEntry {
  std::string label;
  double epsilon;
  double noise_sd;
};

struct MeanEstimate {
  double value;
  double clamp_lo;            // private lower-tail quantile actually used
  double clamp_hi;            // private upper-tail quantile actually used
  double noise_sd;            // (clamp_hi - clamp_lo)/(n * eps_m)
  std::optional<DerivedMeanConfig> config;
  std::vector<AuditEntry> audit;
};

// Instantiates the estimator schedule for a given n and total budget:
// range [l - v(log n)^p, u + v(log n)^p] (prior range (l,u), default (0,0)),
// T = ceil(log2((b-a) n^eta)), budget split via split_budget, and tail
// levels q_l = (tau+2)/n, q_u = 1-(tau+1)/n with tau evaluated at failure
// probability n^{2-eta}.
//
// When n or eps is small enough that 2 tau + 3 >= n the schedule
// degenerates (q_l >= q_u). Rather than fail, the per-side trim count is
// capped at a quarter of the sample: q_l = min(q_l, 0.25),
// q_u = max(q_u, 0.75), and the config is flagged so callers can see the
// nominal schedule was not honored.
inline DerivedMeanConfig derive_params(std::size_t n, const PrivacyBudget& eps,
                                       const MeanEstParams& params) {
  params.validate();
  if (n < 3) throw ConfigError("mean estimation requires n >= 3");

  BudgetSplit split = split_budget(eps.epsilon(), n, params.k);

  const double log_n = std::log(static_cast<double>(n));
  const double half_width = params.v * std::pow(log_n, params.p);
  const double lo_prior = params.prior_range ? params.prior_range->first : 0.0;
  const double hi_prior = params.prior_range ? params.prior_range->second : 0.0;
  const double a = lo_prior - half_width;
  const double b = hi_prior + half_width;

  const double width_bits =
      std::log2((b - a) * std::pow(static_cast<double>(n), params.eta));
  const int steps = static_cast<int>(std::ceil(width_bits));
  if (steps < 1) throw ConfigError("derived step count T < 1");

  // log(T / n^{2-eta}) = log T + (eta-2) log n, positive for eta > 2.
  const double log_t_over_beta =
      std::log(static_cast<double>(steps)) + (params.eta - 2.0) * log_n;
  const double tau =
      std::sqrt(2.0 * steps * log_t_over_beta) / split.eps_q.epsilon();

  double q_lower = (tau + 2.0) / static_cast<double>(n);
  double q_upper = 1.0 - (tau + 1.0) / static_cast<double>(n);
  bool fallback = false;
  if (q_lower >= q_upper) {
    q_lower = std::min(q_lower, 0.25);
    q_upper = std::max(q_upper, 0.75);
    fallback = true;
  }

  const double quantile_beta =
      std::pow(static_cast<double>(n), 2.0 - params.eta);
  return DerivedMeanConfig{n,       a,   b,
                           steps,   q_lower, q_upper,
                           std::move(split), tau, quantile_beta, fallback};
}

// Private mean with data-driven clamping: two tail quantiles are estimated
// privately (budget eps_q each), the data is clamped between them, and the
// clamped mean is released with Gaussian noise of scale
// (clamp_hi - clamp_lo)/(n eps_m). Composition: 2 eps_q^2 + eps_m^2 = eps^2.
//
// Sub-stream order is fixed: lower-quantile search, upper-quantile search,
// mean noise. The upper clamp is forced to max(upper estimate, lower
// estimate) so clamp_lo <= clamp_hi always holds.
inline MeanEstimate gdp_mean(std::span<const double> data,
                             const DerivedMeanConfig& cfg, NoiseSource& noise) {
  if (data.size() != cfg.n) {
    throw ConfigError("config was derived for n = " + std::to_string(cfg.n) +
                      " but data has n = " + std::to_string(data.size()));
  }
  const double eps_q = cfg.split.eps_q.epsilon();
  const double eps_m = cfg.split.eps_m.epsilon();

  const QuantileConfig lower_cfg{cfg.a, cfg.b, cfg.steps, cfg.q_lower,
                                 cfg.split.eps_q, cfg.quantile_beta};
  const QuantileConfig upper_cfg{cfg.a, cfg.b, cfg.steps, cfg.q_upper,
                                 cfg.split.eps_q, cfg.quantile_beta};

  NoiseSource lo_stream = noise.derive("quantile-lo", 0);
  NoiseSource hi_stream = noise.derive("quantile-hi", 0);
  NoiseSource mean_stream = noise.derive("mean-noise", 0);

  const QuantileResult lo_res = gdp_quant(data, lower_cfg, lo_stream);
  const QuantileResult hi_res = gdp_quant(data, upper_cfg, hi_stream);
  const double clamp_lo = lo_res.value;
  const double clamp_hi = std::max(hi_res.value, clamp_lo);

  double sum = 0.0;
  for (double x : data) sum += std::clamp(x, clamp_lo, clamp_hi);
  const double clamped_mean = sum / static_cast<double>(cfg.n);

  const double noise_sd =
      (clamp_hi - clamp_lo) / (static_cast<double>(cfg.n) * eps_m);
  const double value = clamped_mean + noise_sd * mean_stream.next_gaussian();

  MeanEstimate est;
  est.value = value;
  est.clamp_lo = clamp_lo;
  est.clamp_hi = clamp_hi;
  est.noise_sd = noise_sd;
  est.config = cfg;
  est.audit = {{"quantile-lo", eps_q, lo_res.noise_sd_per_step},
               {"quantile-hi", eps_q, hi_res.noise_sd_per_step},
               {"mean-noise", eps_m, noise_sd}};
  return est;
}

// One-call entry point: derive the schedule for this n, then run.
inline MeanEstimate gdp_mean_auto(std::span<const double> data,
                                  const PrivacyBudget& eps,
                                  const MeanEstParams& params,
                                  NoiseSource& noise) {
  const DerivedMeanConfig cfg = derive_params(data.size(), eps, params);
  return gdp_mean(data, cfg, noise);
}

}  // namespace gdptest

#endif  // GDPTEST_MEAN_HPP
