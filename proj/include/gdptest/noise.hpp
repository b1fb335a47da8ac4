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

#ifndef GDPTEST_NOISE_HPP
#define GDPTEST_NOISE_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gdptest/budget.hpp"
#include "gdptest/error.hpp"
#include "gdptest/math.hpp"

namespace gdptest {

// Substream seed derivation: SplitMix64 finalizer chained over the master
// seed, the substream index, and an FNV-1a hash of the label. Derivation
// depends only on these three values, never on how much of the parent
// stream has been consumed, so parallel replicates cannot perturb each
// other's draws.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                 std::string_view label) {
  std::uint64_t s = detail::splitmix64(seed);
  s = detail::splitmix64(s ^ index);
  s = detail::splitmix64(s ^ detail::fnv1a64(label));
  return s;
}

// Source of standard-normal and uniform deviates for every mechanism and
// sampler in the library.
//
// Kinds:
//   seeded   - std::mt19937_64; uniforms from the top 53 output bits,
//              gaussians via the AS241 inverse-CDF transform. The generator
//              and the transform are both fixed algorithms, so one seed
//              reproduces one draw sequence everywhere.
//   zero     - every gaussian is 0 (uniform is 0.5). Test-only.
//   scripted - a fixed list of deviates consumed in call order. Values are
//              in standard-normal units; mechanisms scale them by their own
//              sigma. Test-only.
//
// A seeded instance owns its stream (no sharing across threads); derive()
// children are independent streams. For the test-only kinds, derived
// children share the parent's cursor so a scripted trace is consumed in
// documented mechanism order (lower quantile search, upper quantile
// search, mean noise).
class NoiseSource {
 public:
  enum class Kind { kSeeded, kZero, kScripted };

  static NoiseSource seeded(std::uint64_t seed) {
    NoiseSource s(Kind::kSeeded);
    s.seed_ = seed;
    s.engine_.seed(seed);
    return s;
  }

  static NoiseSource zero() { return NoiseSource(Kind::kZero); }

  static NoiseSource scripted(std::vector<double> draws) {
    NoiseSource s(Kind::kScripted);
    s.script_ = std::make_shared<Script>();
    s.script_->draws = std::move(draws);
    return s;
  }

  Kind kind() const { return kind_; }

  // Only seeded streams may back a released (privacy-bearing) run.
  bool release_safe() const { return kind_ == Kind::kSeeded; }

  // One standard-normal deviate.
  double next_gaussian() {
    switch (kind_) {
      case Kind::kSeeded:
        return detail::inverse_normal_cdf(next_uniform());
      case Kind::kZero:
        return 0.0;
      case Kind::kScripted:
        return pop_script();
    }
    return 0.0;
  }

  // One uniform deviate in (0,1).
  double next_uniform() {
    switch (kind_) {
      case Kind::kSeeded:
        // Top 53 bits, offset by half an ulp so 0 is never produced.
        return (static_cast<double>(engine_() >> 11) + 0.5) *
               (1.0 / 9007199254740992.0);
      case Kind::kZero:
        return 0.5;
      case Kind::kScripted:
        return pop_script();
    }
    return 0.5;
  }

  // Independent child stream named (label, index); see derive_seed above.
  NoiseSource derive(std::string_view label, std::uint64_t index) const {
    switch (kind_) {
      case Kind::kSeeded:
        return seeded(derive_seed(seed_, index, label));
      case Kind::kZero:
        return zero();
      case Kind::kScripted: {
        NoiseSource child(Kind::kScripted);
        child.script_ = script_;  // shared cursor, consumed in call order
        return child;
      }
    }
    return zero();
  }

 private:
  struct Script {
    std::vector<double> draws;
    std::size_t next = 0;
  };

  explicit NoiseSource(Kind kind) : kind_(kind) {}

  double pop_script() {
    if (script_->next >= script_->draws.size()) {
      throw ConfigError("scripted noise source exhausted after " +
                        std::to_string(script_->draws.size()) + " draws");
    }
    return script_->draws[script_->next++];
  }

  Kind kind_;
  std::uint64_t seed_ = 0;
  std::mt19937_64 engine_;
  std::shared_ptr<Script> script_;
};

// The Gaussian mechanism: value + N(0, (sensitivity/eps)^2), the one draw
// taken from the given stream. Satisfies eps-GDP when the stream is seeded
// Gaussian noise.
inline double gaussian_mechanism(double value, double l2_sensitivity,
                                 const PrivacyBudget& eps,
                                 NoiseSource& noise) {
  if (!(l2_sensitivity >= 0.0) || !std::isfinite(l2_sensitivity)) {
    throw ConfigError("l2 sensitivity must be nonnegative and finite");
  }
  const double sd = l2_sensitivity / eps.epsilon();
  return value + sd * noise.next_gaussian();
}

}  // namespace gdptest

#endif  // GDPTEST_NOISE_HPP
