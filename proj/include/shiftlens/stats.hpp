// Copyright 2026 The ShiftLens Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Student t tests and effect sizes.
//
// Two-tailed p-values use the regularized incomplete beta function:
// P(|T| > t) = I_{df / (df + t^2)}(df / 2, 1 / 2).

#ifndef SHIFTLENS_STATS_HPP_
#define SHIFTLENS_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "shiftlens/error.hpp"

namespace shiftlens {

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz method.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1;
  double d = 1 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < kEps) return h;
  }
  return h;
}

inline bool all_equal(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace detail

// I_x(a, b) for a, b > 0 and x in [0, 1].
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw ArgumentError("incomplete beta needs a, b > 0");
  if (!(x >= 0 && x <= 1)) throw ArgumentError("incomplete beta needs x in [0, 1]");
  if (x == 0 || x == 1) return x;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges quickly only on one side of the mean.
  if (x < (a + 1) / (a + b + 2)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1 - front * detail::beta_continued_fraction(b, a, 1 - x) / b;
}

inline double student_t_two_tailed_p(double t, double df) {
  if (!(df > 0)) throw ArgumentError("degrees of freedom must be positive");
  if (std::isnan(t)) throw ArgumentError("t is NaN");
  if (std::isinf(t)) return 0;
  const double p = regularized_incomplete_beta(df / 2, 0.5, df / (df + t * t));
  return std::clamp(p, 0.0, 1.0);
}

inline double mean(std::span<const double> v) {
  if (v.empty()) throw ArgumentError("mean of an empty sample");
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Unbiased (n - 1) variance.
inline double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw ArgumentError("sample variance needs n >= 2");
  const double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

struct TTestResult {
  double t = 0;
  double p = 1;
  int df = 0;
};

// One-sample t test of the mean against zero.
inline TTestResult one_sample_t_test(std::span<const double> d) {
  if (d.size() < 2) throw ArgumentError("t test needs n >= 2");
  TTestResult r;
  r.df = static_cast<int>(d.size() - 1);
  if (detail::all_equal(d)) {
    if (d.front() == 0) return r;
    throw DegenerateVarianceError("differences have zero variance and nonzero mean");
  }
  const double n = static_cast<double>(d.size());
  r.t = mean(d) * std::sqrt(n) / std::sqrt(sample_variance(d));
  r.p = student_t_two_tailed_p(std::abs(r.t), r.df);
  return r;
}

// Paired test on d_i = a_i - b_i.
inline TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("paired samples differ in length");
  if (a.size() < 2) throw ArgumentError("t test needs n >= 2");
  std::vector<double> d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return one_sample_t_test(d);
}

// Student two-sample test with pooled variance, df = n_a + n_b - 2.
inline TTestResult two_sample_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ArgumentError("t test needs n >= 2 per sample");
  TTestResult r;
  r.df = static_cast<int>(a.size() + b.size() - 2);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double diff = mean(a) - mean(b);
  if (detail::all_equal(a) && detail::all_equal(b)) {
    if (a.front() == b.front()) return r;
    throw DegenerateVarianceError("samples have zero variance and different means");
  }
  const double pooled =
      ((na - 1) * sample_variance(a) + (nb - 1) * sample_variance(b)) / (na + nb - 2);
  r.t = diff / std::sqrt(pooled * (1 / na + 1 / nb));
  r.p = student_t_two_tailed_p(std::abs(r.t), r.df);
  return r;
}

enum class EffectMagnitude { kNegligible, kSmall, kMedium, kLarge };

inline std::string_view magnitude_name(EffectMagnitude m) {
  switch (m) {
    case EffectMagnitude::kNegligible: return "negligible";
    case EffectMagnitude::kSmall: return "small";
    case EffectMagnitude::kMedium: return "medium";
    case EffectMagnitude::kLarge: return "large";
  }
  return "negligible";
}

inline EffectMagnitude magnitude_of(double d) {
  const double a = std::abs(d);
  if (a >= 0.8) return EffectMagnitude::kLarge;
  if (a >= 0.5) return EffectMagnitude::kMedium;
  if (a >= 0.2) return EffectMagnitude::kSmall;
  return EffectMagnitude::kNegligible;
}

struct EffectSize {
  double d = 0;
  EffectMagnitude magnitude = EffectMagnitude::kNegligible;
};

inline EffectSize make_effect_size(double d) { return {d, magnitude_of(d)}; }

// (mean(a) - mean(b)) / pooled sd.
inline EffectSize cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ArgumentError("Cohen's d needs n >= 2 per sample");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  if (detail::all_equal(a) && detail::all_equal(b)) {
    if (a.front() == b.front()) return {};
    throw DegenerateVarianceError("pooled standard deviation is zero and means differ");
  }
  const double pooled =
      std::sqrt(((na - 1) * sample_variance(a) + (nb - 1) * sample_variance(b)) / (na + nb - 2));
  return make_effect_size((mean(a) - mean(b)) / pooled);
}

// mean(a - b) / sd(a - b), for paired samples.
inline EffectSize cohens_d_paired(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("paired samples differ in length");
  if (a.size() < 2) throw ArgumentError("Cohen's d needs n >= 2");
  std::vector<double> d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  if (detail::all_equal(d)) {
    if (d.front() == 0) return {};
    throw DegenerateVarianceError("differences have zero variance and nonzero mean");
  }
  return make_effect_size(mean(d) / std::sqrt(sample_variance(d)));
}

}  // namespace shiftlens

#endif  // SHIFTLENS_STATS_HPP_
