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

#ifndef GDPTEST_BUDGET_HPP
#define GDPTEST_BUDGET_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gdptest/error.hpp"

namespace gdptest {

// Gaussian-DP privacy-loss parameter. Budgets compose in quadrature:
// releasing mechanisms with budgets e_1,...,e_k costs sqrt(sum e_i^2).
class PrivacyBudget {
 public:
  explicit PrivacyBudget(double epsilon) : epsilon_(epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw ConfigError("privacy budget epsilon must be positive and finite, got " +
                        std::to_string(epsilon));
    }
  }

  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
};

// Allocation of a total budget across the two tail-quantile searches
// (eps_q each) and the additive mean noise (eps_m), satisfying
// 2*eps_q^2 + eps_m^2 = eps_total^2.
struct BudgetSplit {
  PrivacyBudget eps_q;
  PrivacyBudget eps_m;
  PrivacyBudget eps_total;
};

// Quadrature composition of sequentially released budgets.
inline PrivacyBudget compose(std::span<const PrivacyBudget> budgets) {
  if (budgets.empty()) {
    throw ConfigError("compose requires at least one budget");
  }
  double sum_sq = 0.0;
  for (const PrivacyBudget& b : budgets) {
    sum_sq += b.epsilon() * b.epsilon();
  }
  return PrivacyBudget(std::sqrt(sum_sq));
}

inline PrivacyBudget compose(std::initializer_list<PrivacyBudget> budgets) {
  std::vector<PrivacyBudget> v(budgets);
  return compose(std::span<const PrivacyBudget>(v));
}

// Splits eps_total for the adaptive mean estimator: eps_q = eps/(log n)^k
// and eps_m = eps*sqrt(1 - 2/(log n)^{2k}), natural log. Requires
// (log n)^{2k} > 2 so that eps_m is real.
inline BudgetSplit split_budget(double eps_total, std::size_t n, double k) {
  PrivacyBudget total(eps_total);
  if (n < 3) {
    throw ConfigError("split_budget requires n >= 3, got " + std::to_string(n));
  }
  if (!(k > 0.0) || k > 1.0) {
    throw ConfigError("split exponent k must lie in (0,1], got " +
                      std::to_string(k));
  }
  const double log_n = std::log(static_cast<double>(n));
  const double denom = std::pow(log_n, 2.0 * k);
  if (denom <= 2.0) {
    throw ConfigError("sample too small for split exponent k: (log n)^{2k} = " +
                      std::to_string(denom) + " <= 2");
  }
  const double eps_q = eps_total / std::pow(log_n, k);
  const double eps_m = eps_total * std::sqrt(1.0 - 2.0 / denom);
  return BudgetSplit{PrivacyBudget(eps_q), PrivacyBudget(eps_m), total};
}

}  // namespace gdptest

#endif  // GDPTEST_BUDGET_HPP
