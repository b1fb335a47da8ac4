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

#include "gdptest/budget.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"

namespace gdptest {
namespace {

TEST(PrivacyBudgetTest, RejectsNonPositiveOrNonFinite) {
  EXPECT_THROW(PrivacyBudget(0.0), ConfigError);
  EXPECT_THROW(PrivacyBudget(-1.0), ConfigError);
  EXPECT_THROW(PrivacyBudget(std::numeric_limits<double>::infinity()),
               ConfigError);
  EXPECT_THROW(PrivacyBudget(std::numeric_limits<double>::quiet_NaN()),
               ConfigError);
  EXPECT_DOUBLE_EQ(PrivacyBudget(0.3).epsilon(), 0.3);
}

TEST(ComposeTest, SingleBudgetIsIdentity) {
  EXPECT_DOUBLE_EQ(compose({PrivacyBudget(1.0)}).epsilon(), 1.0);
}

TEST(ComposeTest, TwoHalves) {
  const PrivacyBudget out = compose({PrivacyBudget(0.5), PrivacyBudget(0.5)});
  EXPECT_NEAR(out.epsilon(), 0.70710678118654752, 1e-15);
}

TEST(ComposeTest, EmptyListIsConfigError) {
  std::vector<PrivacyBudget> empty;
  EXPECT_THROW(compose(empty), ConfigError);
}

TEST(ComposeTest, PermutationInvariantAndNestable) {
  std::mt19937_64 rng(20260808);
  std::uniform_real_distribution<double> eps(0.05, 8.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = eps(rng), b = eps(rng), c = eps(rng);
    const double abc =
        compose({PrivacyBudget(a), PrivacyBudget(b), PrivacyBudget(c)})
            .epsilon();
    const double cba =
        compose({PrivacyBudget(c), PrivacyBudget(b), PrivacyBudget(a)})
            .epsilon();
    EXPECT_NEAR(abc, cba, 1e-12 * abc);
    // Composing a pre-composed pair as a single budget must agree.
    const PrivacyBudget bc = compose({PrivacyBudget(b), PrivacyBudget(c)});
    const double nested = compose({PrivacyBudget(a), bc}).epsilon();
    EXPECT_NEAR(nested, abc, 1e-12 * abc);
  }
}

TEST(SplitBudgetTest, ReferenceValues) {
  // eps=1, n=10^4, k=0.5: log n = 9.21034, eps_q = 1/sqrt(log n).
  const BudgetSplit s = split_budget(1.0, 10000, 0.5);
  EXPECT_NEAR(s.eps_q.epsilon(), 0.32950, 1e-5);
  EXPECT_NEAR(s.eps_m.epsilon(), 0.88479, 1e-5);
  EXPECT_DOUBLE_EQ(s.eps_total.epsilon(), 1.0);
}

TEST(SplitBudgetTest, TooSmallSampleForExponent) {
  // n=3, k=1: (log 3)^2 = 1.207 <= 2, eps_m would be imaginary.
  try {
    split_budget(1.0, 3, 1.0);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("sample too small"),
              std::string::npos);
  }
}

TEST(SplitBudgetTest, RejectsBadArguments) {
  EXPECT_THROW(split_budget(1.0, 2, 0.5), ConfigError);
  EXPECT_THROW(split_budget(0.0, 100, 0.5), ConfigError);
  EXPECT_THROW(split_budget(1.0, 100, 0.0), ConfigError);
  EXPECT_THROW(split_budget(1.0, 100, 1.5), ConfigError);
}

TEST(SplitBudgetTest, CompositionIdentityPropertySweep) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> eps_gen(0.1, 10.0);
  std::uniform_real_distribution<double> k_gen(0.01, 1.0);
  std::uniform_int_distribution<std::size_t> n_gen(10, 1000000);
  int valid = 0;
  for (int i = 0; i < 1000; ++i) {
    const double eps = eps_gen(rng);
    const double k = k_gen(rng);
    const std::size_t n = n_gen(rng);
    const double guard = std::pow(std::log(static_cast<double>(n)), 2.0 * k);
    if (guard <= 2.0) {
      EXPECT_THROW(split_budget(eps, n, k), ConfigError);
      continue;
    }
    const BudgetSplit s = split_budget(eps, n, k);
    ++valid;
    const double lhs = 2.0 * s.eps_q.epsilon() * s.eps_q.epsilon() +
                       s.eps_m.epsilon() * s.eps_m.epsilon();
    EXPECT_NEAR(lhs, eps * eps, 1e-12 * eps * eps);
    EXPECT_GT(s.eps_q.epsilon(), 0.0);
    EXPECT_LT(s.eps_q.epsilon(), eps);
    EXPECT_GT(s.eps_m.epsilon(), 0.0);
    EXPECT_LT(s.eps_m.epsilon(), eps);
    // The split parts must compose back to the total.
    const double back =
        compose({s.eps_q, s.eps_q, s.eps_m}).epsilon();
    EXPECT_NEAR(back, eps, 1e-12 * eps);
  }
  EXPECT_GT(valid, 500);  // most draws should hit the valid branch
}

}  // namespace
}  // namespace gdptest
