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

#ifndef GDPTEST_QUANTILE_HPP
#define GDPTEST_QUANTILE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gdptest/budget.hpp"
#include "gdptest/error.hpp"
#include "gdptest/noise.hpp"

namespace gdptest {

// Private quantile selection by noisy binary search over [a,b].
//
// Each of the T steps releases a noisy count, so the per-step budget is
// eps/sqrt(T) and the per-step noise is N(0, T/eps^2); the T steps compose
// to eps-GDP (count sensitivity is 1 under change-one-record neighbors).
//
// Midpoints are kept as exact binary rationals of [a,b]; after T steps the
// search interval has width (b-a)/2^T, the bin width. Flooring midpoints to
// integers (as some earlier designs did) fixes the bin width at 1, and once
// several points share a bin the search cannot separate them: an answer
// that is off by one bin is then off by one point per duplicate, not one
// rank. Worked failure case for the floor-based variant: data {1,...,10} on
// [0,20], target rank 3, every noisy count low by exactly 1 (so within a
// noise bound of tau = 1). The integer midpoints walk 10 -> 5 -> 2 -> 4 and
// the final interval collapse returns 5, whose true rank is 5: rank error 2
// = tau + 1 already, and tau + p if p points share the returned value.
// Keeping the bin width a free parameter via T restores the tau + 1
// guarantee whenever every bin holds at most one point.
struct QuantileConfig {
  double a;              // search lower bound
  double b;              // search upper bound
  int steps;             // T, number of halvings
  double level;          // q, target quantile level in (0,1)
  PrivacyBudget eps;
  double beta = 0.05;    // failure probability used for the reported tau

  void validate() const {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
      throw ConfigError("quantile search range requires a < b, both finite");
    }
    if (steps < 1) throw ConfigError("quantile step count T must be >= 1");
    if (!(level > 0.0 && level < 1.0)) {
      throw ConfigError("quantile level q must lie in (0,1)");
    }
    if (!(beta > 0.0 && beta < 1.0)) {
      throw ConfigError("failure probability beta must lie in (0,1)");
    }
    if (!std::isfinite(bin_width()) || !(bin_width() > 0.0)) {
      throw ConfigError("bin width (b-a)/2^T must be positive and finite");
    }
  }

  double bin_width() const { return (b - a) / std::ldexp(1.0, steps); }
};

struct QuantileResult {
  double value;              // final midpoint
  double bin_width;          // (b-a)/2^T
  double tau;                // rank-error bound at the configured beta
  int steps_taken;
  double noise_sd_per_step;  // sqrt(T)/eps, recorded for budget audits
  double epsilon;            // budget spent by this call
};

// High-probability rank-error bound tau = (1/eps) sqrt(2 T log(T/beta)).
// Clamped at zero in the (unreachable for integer T >= 1) case T < beta.
inline double rank_error_bound(int steps, const PrivacyBudget& eps,
                               double beta) {
  if (steps < 1) throw ConfigError("rank_error_bound requires T >= 1");
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ConfigError("rank_error_bound requires beta in (0,1)");
  }
  const double radicand =
      2.0 * steps * std::log(static_cast<double>(steps) / beta);
  if (radicand <= 0.0) return 0.0;
  return std::sqrt(radicand) / eps.epsilon();
}

// Test oracle: |#{x_i <= value} - round(n*q)|, with the target rank rounded
// to the nearest integer (the search itself compares against real-valued
// n*q; rounding only enters this measurement).
inline std::size_t rank_error(std::span<const double> data, double value,
                              double q) {
  if (data.empty()) throw ConfigError("rank_error requires non-empty data");
  std::size_t count = 0;
  for (double x : data) {
    if (x <= value) ++count;
  }
  const long long target = std::llround(q * static_cast<double>(data.size()));
  const long long diff = static_cast<long long>(count) - target;
  return static_cast<std::size_t>(diff < 0 ? -diff : diff);
}

// Noisy binary search. Clamps every point into [a,b], then for T steps
// compares #{x_j <= mid} + Z_t against n*q with Z_t ~ N(0, T/eps^2):
// strictly below goes right (left <- mid), otherwise left (right <- mid).
// Returns the final midpoint. eps-GDP when the noise source is seeded.
inline QuantileResult gdp_quant(std::span<const double> data,
                                const QuantileConfig& cfg, NoiseSource& noise) {
  cfg.validate();
  if (data.empty()) throw ConfigError("gdp_quant requires non-empty data");

  std::vector<double> sorted(data.begin(), data.end());
  for (double& x : sorted) x = std::clamp(x, cfg.a, cfg.b);
  std::sort(sorted.begin(), sorted.end());

  const double n_q = cfg.level * static_cast<double>(sorted.size());
  const double noise_sd =
      std::sqrt(static_cast<double>(cfg.steps)) / cfg.eps.epsilon();

  double left = cfg.a;
  double right = cfg.b;
  double mid = 0.5 * (left + right);
  for (int t = 0; t < cfg.steps; ++t) {
    const auto count = static_cast<double>(
        std::upper_bound(sorted.begin(), sorted.end(), mid) - sorted.begin());
    const double noisy_count = count + noise_sd * noise.next_gaussian();
    if (noisy_count < n_q) {
      left = mid;
    } else {
      right = mid;
    }
    mid = 0.5 * (left + right);
  }

  return QuantileResult{mid, cfg.bin_width(),
                        rank_error_bound(cfg.steps, cfg.eps, cfg.beta),
                        cfg.steps, noise_sd, cfg.eps.epsilon()};
}

}  // namespace gdptest

#endif  // GDPTEST_QUANTILE_HPP
