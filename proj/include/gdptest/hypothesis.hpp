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

#ifndef GDPTEST_HYPOTHESIS_HPP
#define GDPTEST_HYPOTHESIS_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gdptest/budget.hpp"
#include "gdptest/distribution.hpp"
#include "gdptest/error.hpp"
#include "gdptest/mean.hpp"
#include "gdptest/noise.hpp"

namespace gdptest {

// H0: data ~ null_dist vs H1: data ~ alt_dist. Rejects for large private
// mean of the per-point log-likelihood ratios log(f_alt/f_null).
struct SimpleHypothesis {
  Distribution null_dist;
  Distribution alt_dist;
};

// H0: theta <= theta0 vs H1: theta > theta0 in an MLR family; null_dist is
// the family at theta0. Rejects for large private mean of the sufficient
// statistic.
struct OneSidedHypothesis {
  Distribution null_dist;
};

// H0: theta = theta0 vs H1: theta != theta0; equal-tail rule on the private
// mean of the sufficient statistic.
struct TwoSidedHypothesis {
  Distribution null_dist;
};

struct TestSpec {
  std::variant<SimpleHypothesis, OneSidedHypothesis, TwoSidedHypothesis> kind;
  double alpha;
  int mc_reps;  // M, count of simulated null replicates
  PrivacyBudget eps;
  MeanEstParams mean_params;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw ConfigError("alpha must lie in (0,1)");
    }
    if (mc_reps < 1) throw ConfigError("mc_reps must be >= 1");
    // Minimum attainable p-value 1/(M+1) must not exceed alpha.
    if (static_cast<double>(mc_reps + 1) * alpha < 1.0 - 1e-12) {
      const int needed = static_cast<int>(std::ceil(1.0 / alpha)) - 1;
      throw ConfigError("mc_reps too small: need M >= ceil(1/alpha) - 1 = " +
                        std::to_string(needed));
    }
  }
};

struct TestVerdict {
  double statistic = 0.0;  // the released private mean
  double p_value = 1.0;
  bool reject = false;
  std::optional<std::pair<double, double>> tails;  // (p_lower, p_upper)
  int mc_reps_used = 0;
  std::optional<PrivacyBudget> budget_spent;  // nullopt for non-private tests
};

enum class TailDirection { kGreater, kLess };

// Conservative Monte Carlo p-value: (1 + #exceedances)/(M+1). The greater
// direction counts null statistics >= stat (large observed values give
// small p); less mirrors with <=.
inline double mc_pvalue(double stat, std::span<const double> null_stats,
                        TailDirection direction) {
  if (null_stats.empty()) throw ConfigError("mc_pvalue requires M >= 1");
  std::size_t exceed = 0;
  if (direction == TailDirection::kGreater) {
    for (double s : null_stats) {
      if (s >= stat) ++exceed;
    }
  } else {
    for (double s : null_stats) {
      if (s <= stat) ++exceed;
    }
  }
  return static_cast<double>(1 + exceed) /
         static_cast<double>(null_stats.size() + 1);
}

namespace detail {

// Shared Monte Carlo calibration engine. The real data enters through
// exactly one estimator call (on its transformed statistic vector); the M
// null replicates are drawn from null_dist and pushed through the identical
// transform + estimator pipeline on independently derived streams, so the
// simulated null distribution carries all mechanism randomness.
//
// transform: span<const double> data -> std::vector<double> statistic vector
// estimator: (span<const double> stats, NoiseSource&) -> double
template <typename TransformFn, typename EstimatorFn>
TestVerdict run_mc_test(std::span<const double> data,
                        const Distribution& null_dist, double alpha,
                        int mc_reps, bool two_sided, NoiseSource& noise,
                        TransformFn&& transform, EstimatorFn&& estimator) {
  NoiseSource data_stream = noise.derive("data-mech", 0);
  const std::vector<double> real_stats = transform(data);
  const double stat = estimator(std::span<const double>(real_stats),
                                data_stream);

  std::vector<double> null_mc(mc_reps);
  for (int m = 0; m < mc_reps; ++m) {
    NoiseSource gen_stream = noise.derive("null-data", m + 1);
    NoiseSource mech_stream = noise.derive("null-mech", m + 1);
    const Sample synthetic = sample(null_dist, data.size(), gen_stream);
    const std::vector<double> stats = transform(synthetic);
    null_mc[m] = estimator(std::span<const double>(stats), mech_stream);
  }

  TestVerdict verdict;
  verdict.statistic = stat;
  verdict.mc_reps_used = mc_reps;
  if (two_sided) {
    const double p_lower = mc_pvalue(stat, null_mc, TailDirection::kLess);
    const double p_upper = mc_pvalue(stat, null_mc, TailDirection::kGreater);
    const double p_min = std::min(p_lower, p_upper);
    verdict.tails = {p_lower, p_upper};
    verdict.p_value = std::min(1.0, 2.0 * p_min);
    verdict.reject = p_min <= 0.5 * alpha;
  } else {
    verdict.p_value = mc_pvalue(stat, null_mc, TailDirection::kGreater);
    verdict.reject = verdict.p_value <= alpha;
  }
  return verdict;
}

inline auto private_mean_estimator(const PrivacyBudget& eps,
                                   const MeanEstParams& params) {
  return [eps, params](std::span<const double> stats, NoiseSource& stream) {
    return gdp_mean_auto(stats, eps, params, stream).value;
  };
}

}  // namespace detail

// Private simple-hypothesis test: the statistic is the private mean of the
// log-likelihood ratio vector, the only access to the real data, so the
// whole test spends eps-GDP. Calibration is by M simulated null replicates.
inline TestVerdict simple_test(std::span<const double> data,
                               const TestSpec& spec, NoiseSource& noise) {
  spec.validate();
  const auto* hyp = std::get_if<SimpleHypothesis>(&spec.kind);
  if (hyp == nullptr) throw ConfigError("simple_test requires a simple spec");
  auto verdict = detail::run_mc_test(
      data, hyp->null_dist, spec.alpha, spec.mc_reps, /*two_sided=*/false,
      noise,
      [&](std::span<const double> d) {
        return llr_vector(d, hyp->null_dist, hyp->alt_dist).values;
      },
      detail::private_mean_estimator(spec.eps, spec.mean_params));
  verdict.budget_spent = spec.eps;
  return verdict;
}

// Private one-sided MLR test: private mean of the sufficient statistic,
// rejecting for large values against M replicates simulated at theta0.
inline TestVerdict one_sided_test(std::span<const double> data,
                                  const TestSpec& spec, NoiseSource& noise) {
  spec.validate();
  const auto* hyp = std::get_if<OneSidedHypothesis>(&spec.kind);
  if (hyp == nullptr) {
    throw ConfigError("one_sided_test requires a one-sided spec");
  }
  auto verdict = detail::run_mc_test(
      data, hyp->null_dist, spec.alpha, spec.mc_reps, /*two_sided=*/false,
      noise,
      [&](std::span<const double> d) {
        return mlr_statistic(d, hyp->null_dist).values;
      },
      detail::private_mean_estimator(spec.eps, spec.mean_params));
  verdict.budget_spent = spec.eps;
  return verdict;
}

// Private two-sided test with the equal-tail rule: reject when either tail
// p-value is at most alpha/2; the reported p-value is min(1, 2 min(tails)).
inline TestVerdict two_sided_test(std::span<const double> data,
                                  const TestSpec& spec, NoiseSource& noise) {
  spec.validate();
  const auto* hyp = std::get_if<TwoSidedHypothesis>(&spec.kind);
  if (hyp == nullptr) {
    throw ConfigError("two_sided_test requires a two-sided spec");
  }
  auto verdict = detail::run_mc_test(
      data, hyp->null_dist, spec.alpha, spec.mc_reps, /*two_sided=*/true,
      noise,
      [&](std::span<const double> d) {
        return mlr_statistic(d, hyp->null_dist).values;
      },
      detail::private_mean_estimator(spec.eps, spec.mean_params));
  verdict.budget_spent = spec.eps;
  return verdict;
}

}  // namespace gdptest

#endif  // GDPTEST_HYPOTHESIS_HPP
