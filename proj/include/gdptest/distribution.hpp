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

#ifndef GDPTEST_DISTRIBUTION_HPP
#define GDPTEST_DISTRIBUTION_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gdptest/error.hpp"
#include "gdptest/math.hpp"
#include "gdptest/noise.hpp"

namespace gdptest {

class Distribution;

struct Normal {
  double mean;
  double sd;
};

struct Logistic {
  double location;
  double scale;
};

struct Gamma {
  double shape;
  double rate;
};

struct StudentT {
  double df;
};

struct NoncentralT {
  NoncentralT(double df_, double ncp_)
      : df(df_),
        ncp(ncp_),
        log_norm(0.5 * df_ * std::log(df_) - 0.5 * ncp_ * ncp_ -
                 0.5 * std::log(M_PI) - std::lgamma(0.5 * df_)),
        c_even0(std::exp(std::lgamma(0.5 * (df_ + 1.0)))),
        c_odd0(std::exp(std::lgamma(0.5 * (df_ + 2.0)))) {}

  double df;
  double ncp;
  // Cached density constants; the per-point series then needs no lgamma.
  double log_norm;  // 0.5 df log df - ncp^2/2 - log(sqrt(pi)) - lgamma(df/2)
  double c_even0;   // Gamma((df+1)/2), series seed for even terms
  double c_odd0;    // Gamma((df+2)/2), series seed for odd terms
};

struct Mixture {
  std::vector<double> weights;
  std::vector<Distribution> components;
};

// One-dimensional distribution used for data generation, densities, and
// likelihood ratios. Immutable value type; all operations on it are pure.
class Distribution {
 public:
  using Family =
      std::variant<Normal, Logistic, Gamma, StudentT, NoncentralT, Mixture>;

  explicit Distribution(Family family) : family_(std::move(family)) {
    validate();
  }

  static Distribution normal(double mean, double sd) {
    return Distribution(Normal{mean, sd});
  }
  static Distribution logistic(double location, double scale) {
    return Distribution(Logistic{location, scale});
  }
  static Distribution gamma(double shape, double rate) {
    return Distribution(Gamma{shape, rate});
  }
  static Distribution student_t(double df) {
    return Distribution(StudentT{df});
  }
  static Distribution noncentral_t(double df, double ncp) {
    return Distribution(NoncentralT{df, ncp});
  }
  static Distribution mixture(std::vector<double> weights,
                              std::vector<Distribution> components) {
    return Distribution(Mixture{std::move(weights), std::move(components)});
  }

  const Family& family() const { return family_; }

  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&family_);
  }

 private:
  void validate() const;

  Family family_;
};

using Sample = std::vector<double>;

// Per-observation statistic vector (log-likelihood ratios or MLR
// sufficient statistics), same length as the source sample.
struct StatisticVector {
  enum class Label { kLlr, kMlr };
  std::vector<double> values;
  Label label;
};

namespace detail {

inline bool finite_number(double x) { return std::isfinite(x); }

inline double normal_log_density(const Normal& d, double x) {
  const double z = (x - d.mean) / d.sd;
  return -0.5 * kLogTwoPi - std::log(d.sd) - 0.5 * z * z;
}

inline double logistic_log_density(const Logistic& d, double x) {
  // f(x) = e^{-z} / (s (1 + e^{-z})^2); evaluated through -|z| so neither
  // tail overflows.
  const double z = (x - d.location) / d.scale;
  const double az = std::fabs(z);
  return -az - 2.0 * std::log1p(std::exp(-az)) - std::log(d.scale);
}

inline double gamma_log_density(const Gamma& d, double x) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return d.shape * std::log(d.rate) - std::lgamma(d.shape) +
         (d.shape - 1.0) * std::log(x) - d.rate * x;
}

inline double student_t_log_density(const StudentT& d, double x) {
  const double v = d.df;
  return std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) -
         0.5 * std::log(v * M_PI) -
         0.5 * (v + 1.0) * std::log1p(x * x / v);
}

// Noncentral-t density by the Poisson-weighted series
//   f(t) = C(v,d) (v+t^2)^{-(v+1)/2} sum_j G((v+j+1)/2)/j! * x^j,
//   x = sqrt(2) t d / sqrt(v+t^2),  C(v,d) = v^{v/2} e^{-d^2/2}/(sqrt(pi) G(v/2)),
// obtained by expanding exp(t*d*w) inside the scale-mixture integral.
// Usable only when the leading term ratio (c_1/c_0)|x| stays small: for
// negative x the series alternates and larger ratios cancel catastrophically.
// The dispatcher below falls back to direct quadrature of the scale-mixture
// integral outside that region, keeping both routes at the 1e-10 target.
inline double noncentral_t_series_sum(double df, double x, double c_even0,
                                      double c_odd0, int max_terms,
                                      double tol) {
  // Two interleaved chains: c_{j+2} = c_j * ((v+j+1)/2) / ((j+1)(j+2)).
  double c_even = c_even0;
  double c_odd = c_odd0;
  double sum = c_even + c_odd * x;
  double x_pow = 1.0;
  for (int j = 0; j + 2 < max_terms; j += 2) {
    c_even *= (0.5 * (df + j + 1.0)) / ((j + 1.0) * (j + 2.0));
    c_odd *= (0.5 * (df + j + 2.0)) / ((j + 2.0) * (j + 3.0));
    x_pow *= x * x;  // advance two powers: x^{j+2}
    const double t_even = c_even * x_pow;
    const double t_odd = c_odd * x_pow * x;
    sum += t_even + t_odd;
    if (std::fabs(t_even) + std::fabs(t_odd) < tol * std::fabs(sum)) break;
  }
  return sum;
}

inline double noncentral_t_log_density_series(const NoncentralT& d, double t) {
  const double v = d.df;
  const double x = M_SQRT2 * t * d.ncp / std::sqrt(v + t * t);
  const double sum =
      noncentral_t_series_sum(v, x, d.c_even0, d.c_odd0, 400, 1e-16);
  return d.log_norm - 0.5 * (v + 1.0) * std::log(v + t * t) + std::log(sum);
}

// Quadrature route: f(t) = C int_0^inf w^v exp(-(v+t^2)w^2/2 + t d w - d^2/2) dw
// with C = 2 (v/2)^{v/2} / (G(v/2) sqrt(2 pi)), i.e. the density of
// (Z + d)/W with W = sqrt(chi2_v / v) integrated over the scale W.
inline double noncentral_t_log_density_quadrature(const NoncentralT& d,
                                                  double t) {
  const double v = d.df;
  const double a = v + t * t;
  const double b = t * d.ncp;
  const double log_c = std::log(2.0) + 0.5 * v * std::log(0.5 * v) -
                       std::lgamma(0.5 * v) - 0.5 * std::log(2.0 * M_PI);
  // Peak of the log-integrand v*log w - a w^2/2 + b w.
  const double w_star = (b + std::sqrt(b * b + 4.0 * a * v)) / (2.0 * a);
  const double spread = 1.0 / std::sqrt(v / (w_star * w_star) + a);
  const double log_peak =
      v * std::log(w_star) - 0.5 * a * w_star * w_star + b * w_star;
  const auto integrand = [&](double w) {
    if (w <= 0.0) return 0.0;
    return std::exp(v * std::log(w) - 0.5 * a * w * w + b * w - log_peak);
  };
  const double lo = std::max(0.0, w_star - 14.0 * spread);
  const double hi = w_star + 14.0 * spread;
  const double integral = integrate(integrand, lo, hi, 1e-13 * (hi - lo), 64);
  return log_c - 0.5 * d.ncp * d.ncp + log_peak + std::log(integral);
}

inline double noncentral_t_log_density(const NoncentralT& d, double t) {
  const double x = M_SQRT2 * t * d.ncp / std::sqrt(d.df + t * t);
  const double first_ratio = (d.c_odd0 / d.c_even0) * std::fabs(x);
  if (first_ratio <= 0.4 && d.df <= 60.0) {
    return noncentral_t_log_density_series(d, t);
  }
  return noncentral_t_log_density_quadrature(d, t);
}

// Marsaglia-Tsang gamma sampler; rejection, so the number of deviates
// consumed varies, but the path is a pure function of the stream.
inline double gamma_sample(double shape, double rate, NoiseSource& noise) {
  if (shape < 1.0) {
    const double g = gamma_sample(shape + 1.0, 1.0, noise);
    const double u = noise.next_uniform();
    return g * std::pow(u, 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = noise.next_gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = noise.next_uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v / rate;
    }
  }
}

inline double chi_square_sample(double df, NoiseSource& noise) {
  return 2.0 * gamma_sample(0.5 * df, 1.0, noise);
}

// Index of the mixture component selected by one uniform deviate.
inline std::size_t pick_component(std::span<const double> weights, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace detail

inline void Distribution::validate() const {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Normal>) {
          if (!(d.sd > 0.0) || !detail::finite_number(d.sd) ||
              !detail::finite_number(d.mean)) {
            throw ConfigError("normal requires finite mean and sd > 0");
          }
        } else if constexpr (std::is_same_v<T, Logistic>) {
          if (!(d.scale > 0.0) || !detail::finite_number(d.scale) ||
              !detail::finite_number(d.location)) {
            throw ConfigError("logistic requires finite location and scale > 0");
          }
        } else if constexpr (std::is_same_v<T, Gamma>) {
          if (!(d.shape > 0.0) || !(d.rate > 0.0) ||
              !detail::finite_number(d.shape) ||
              !detail::finite_number(d.rate)) {
            throw ConfigError("gamma requires shape > 0 and rate > 0");
          }
        } else if constexpr (std::is_same_v<T, StudentT>) {
          if (!(d.df > 0.0) || !detail::finite_number(d.df)) {
            throw ConfigError("t requires df > 0");
          }
        } else if constexpr (std::is_same_v<T, NoncentralT>) {
          if (!(d.df > 0.0) || !detail::finite_number(d.df) ||
              !detail::finite_number(d.ncp)) {
            throw ConfigError("nct requires df > 0 and finite ncp");
          }
        } else if constexpr (std::is_same_v<T, Mixture>) {
          if (d.components.empty() ||
              d.weights.size() != d.components.size()) {
            throw ConfigError(
                "mixture requires matching, non-empty weights and components");
          }
          double sum = 0.0;
          for (double w : d.weights) {
            if (!(w >= 0.0) || !detail::finite_number(w)) {
              throw ConfigError("mixture weights must be nonnegative");
            }
            sum += w;
          }
          if (std::fabs(sum - 1.0) > 1e-12) {
            throw ConfigError("mixture weights must sum to 1, got " +
                              std::to_string(sum));
          }
        }
      },
      family_);
}

// Natural-log density; -inf outside the support.
inline double log_density(const Distribution& dist, double x) {
  return std::visit(
      [x](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return detail::normal_log_density(d, x);
        } else if constexpr (std::is_same_v<T, Logistic>) {
          return detail::logistic_log_density(d, x);
        } else if constexpr (std::is_same_v<T, Gamma>) {
          return detail::gamma_log_density(d, x);
        } else if constexpr (std::is_same_v<T, StudentT>) {
          return detail::student_t_log_density(d, x);
        } else if constexpr (std::is_same_v<T, NoncentralT>) {
          return detail::noncentral_t_log_density(d, x);
        } else {
          // Mixture: log-sum-exp keeps far-tail evaluations (|x| in the
          // thousands for t components) from underflowing to -inf too soon.
          double acc = -std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < d.components.size(); ++i) {
            if (d.weights[i] == 0.0) continue;
            acc = detail::log_add_exp(
                acc, std::log(d.weights[i]) + log_density(d.components[i], x));
          }
          return acc;
        }
      },
      dist.family());
}

// One draw. Noncentral t uses the defining construction
// (Z + ncp)/sqrt(chi2_df/df); central t the same with ncp = 0.
inline double sample_one(const Distribution& dist, NoiseSource& noise) {
  return std::visit(
      [&noise](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return d.mean + d.sd * noise.next_gaussian();
        } else if constexpr (std::is_same_v<T, Logistic>) {
          const double u = noise.next_uniform();
          return d.location + d.scale * std::log(u / (1.0 - u));
        } else if constexpr (std::is_same_v<T, Gamma>) {
          return detail::gamma_sample(d.shape, d.rate, noise);
        } else if constexpr (std::is_same_v<T, StudentT>) {
          if (d.df == 1.0) {
            // Exact inverse CDF for df = 1; the scale-mixture construction
            // below works too but costs a chi-square rejection loop.
            return std::tan(M_PI * (noise.next_uniform() - 0.5));
          }
          const double z = noise.next_gaussian();
          const double v = detail::chi_square_sample(d.df, noise);
          return z / std::sqrt(v / d.df);
        } else if constexpr (std::is_same_v<T, NoncentralT>) {
          const double z = noise.next_gaussian();
          const double v = detail::chi_square_sample(d.df, noise);
          return (z + d.ncp) / std::sqrt(v / d.df);
        } else {
          const std::size_t i =
              detail::pick_component(d.weights, noise.next_uniform());
          return sample_one(d.components[i], noise);
        }
      },
      dist.family());
}

inline Sample sample(const Distribution& dist, std::size_t n,
                     NoiseSource& noise) {
  if (n == 0) throw ConfigError("sample size must be at least 1");
  Sample out(n);
  for (double& x : out) x = sample_one(dist, noise);
  return out;
}

// Per-point log-likelihood ratios log f_alt(x_i) - log f_null(x_i); large
// values are evidence against the null.
inline StatisticVector llr_vector(std::span<const double> data,
                                  const Distribution& null_dist,
                                  const Distribution& alt_dist) {
  StatisticVector out;
  out.label = StatisticVector::Label::kLlr;
  out.values.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double ln = log_density(null_dist, data[i]);
    const double la = log_density(alt_dist, data[i]);
    if (!std::isfinite(ln) || !std::isfinite(la)) {
      throw DataError("data point at index " + std::to_string(i) + " (" +
                      std::to_string(data[i]) +
                      ") is outside the support of the null or alternative");
    }
    out.values[i] = la - ln;
  }
  return out;
}

// Per-point MLR sufficient statistic. Location families (normal, logistic)
// have monotone likelihood ratio in x itself. For gamma with the rate free,
// the natural parameter is -rate, so the statistic is -x. Other families
// are not supported.
inline StatisticVector mlr_statistic(std::span<const double> data,
                                     const Distribution& family) {
  StatisticVector out;
  out.label = StatisticVector::Label::kMlr;
  out.values.resize(data.size());
  if (family.get_if<Normal>() || family.get_if<Logistic>()) {
    std::copy(data.begin(), data.end(), out.values.begin());
  } else if (family.get_if<Gamma>()) {
    std::transform(data.begin(), data.end(), out.values.begin(),
                   [](double x) { return -x; });
  } else {
    throw ConfigError(
        "mlr_statistic supports normal, logistic, and gamma families only");
  }
  return out;
}

// Population mean, where defined. Needed by the benchmark's error metric.
inline double true_mean(const Distribution& dist) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return d.mean;
        } else if constexpr (std::is_same_v<T, Logistic>) {
          return d.location;
        } else if constexpr (std::is_same_v<T, Gamma>) {
          return d.shape / d.rate;
        } else if constexpr (std::is_same_v<T, StudentT>) {
          if (d.df <= 1.0) throw ConfigError("t mean undefined for df <= 1");
          return 0.0;
        } else if constexpr (std::is_same_v<T, NoncentralT>) {
          if (d.df <= 1.0) throw ConfigError("nct mean undefined for df <= 1");
          return d.ncp * std::sqrt(0.5 * d.df) *
                 std::exp(std::lgamma(0.5 * (d.df - 1.0)) -
                          std::lgamma(0.5 * d.df));
        } else {
          double m = 0.0;
          for (std::size_t i = 0; i < d.components.size(); ++i) {
            m += d.weights[i] * true_mean(d.components[i]);
          }
          return m;
        }
      },
      dist.family());
}

//
// Specification grammar shared with the CLI and config files:
//   normal(m,sd)  logistic(loc,scale)  gamma(shape,rate)  t(df)
//   nct(df,ncp)   mixture(w1:dist1,w2:dist2,...)
// "student_t" and "noncentral_t" are accepted as aliases.
//

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("invalid number '" + std::string(s) +
                      "' in distribution spec");
  }
  return v;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

// Splits on top-level occurrences of sep, ignoring separators nested in
// parentheses.
inline std::vector<std::string_view> split_top_level(std::string_view s,
                                                     char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == sep && depth == 0) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(s.substr(start));
  return parts;
}

}  // namespace detail

inline Distribution parse_distribution(std::string_view spec) {
  const std::string_view s = detail::trim(spec);
  const std::size_t open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') {
    throw ConfigError("distribution spec must look like family(args): '" +
                      std::string(spec) + "'");
  }
  const std::string_view name = detail::trim(s.substr(0, open));
  const std::string_view args = s.substr(open + 1, s.size() - open - 2);
  const auto parts = detail::split_top_level(args, ',');

  const auto scalar_args = [&](std::size_t want) {
    if (parts.size() != want) {
      throw ConfigError(std::string(name) + " takes " + std::to_string(want) +
                        " parameter(s), got " + std::to_string(parts.size()));
    }
    std::vector<double> out;
    out.reserve(want);
    for (auto p : parts) out.push_back(detail::parse_double(detail::trim(p)));
    return out;
  };

  if (name == "normal") {
    const auto a = scalar_args(2);
    return Distribution::normal(a[0], a[1]);
  }
  if (name == "logistic") {
    const auto a = scalar_args(2);
    return Distribution::logistic(a[0], a[1]);
  }
  if (name == "gamma") {
    const auto a = scalar_args(2);
    return Distribution::gamma(a[0], a[1]);
  }
  if (name == "t" || name == "student_t") {
    const auto a = scalar_args(1);
    return Distribution::student_t(a[0]);
  }
  if (name == "nct" || name == "noncentral_t") {
    const auto a = scalar_args(2);
    return Distribution::noncentral_t(a[0], a[1]);
  }
  if (name == "mixture") {
    std::vector<double> weights;
    std::vector<Distribution> components;
    for (auto p : parts) {
      const auto wc = detail::split_top_level(detail::trim(p), ':');
      if (wc.size() != 2) {
        throw ConfigError("mixture entries must be weight:dist, got '" +
                          std::string(p) + "'");
      }
      weights.push_back(detail::parse_double(detail::trim(wc[0])));
      components.push_back(parse_distribution(wc[1]));
    }
    return Distribution::mixture(std::move(weights), std::move(components));
  }
  throw ConfigError("unknown distribution family '" + std::string(name) + "'");
}

inline std::string to_string(const Distribution& dist) {
  using detail::format_double;
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return "normal(" + format_double(d.mean) + "," +
                 format_double(d.sd) + ")";
        } else if constexpr (std::is_same_v<T, Logistic>) {
          return "logistic(" + format_double(d.location) + "," +
                 format_double(d.scale) + ")";
        } else if constexpr (std::is_same_v<T, Gamma>) {
          return "gamma(" + format_double(d.shape) + "," +
                 format_double(d.rate) + ")";
        } else if constexpr (std::is_same_v<T, StudentT>) {
          return "t(" + format_double(d.df) + ")";
        } else if constexpr (std::is_same_v<T, NoncentralT>) {
          return "nct(" + format_double(d.df) + "," + format_double(d.ncp) +
                 ")";
        } else {
          std::string out = "mixture(";
          for (std::size_t i = 0; i < d.components.size(); ++i) {
            if (i > 0) out += ",";
            out += format_double(d.weights[i]) + ":" +
                   to_string(d.components[i]);
          }
          return out + ")";
        }
      },
      dist.family());
}

}  // namespace gdptest

#endif  // GDPTEST_DISTRIBUTION_HPP
