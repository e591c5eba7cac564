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

#include "shiftlens/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace shiftlens {
namespace {

struct TablePoint {
  double df, t, p;
};

// Two-tailed Student probabilities, computed independently with
// scipy.stats.t.sf(t, df) * 2.
const TablePoint kTable[] = {
    {1, 1, 0.49999999999999956},   {1, 1.96, 0.30034289177603307},
    {1, 2.576, 0.2357350041597957}, {2, 1, 0.42264973081037427},
    {2, 1.96, 0.18905730960173223}, {2, 2.576, 0.12341270004622765},
    {5, 1, 0.36321746764912255},   {5, 1.96, 0.1072879525052941},
    {5, 2.576, 0.04967243017101064}, {10, 1, 0.3408931323020601},
    {10, 1.96, 0.07843624024769974}, {10, 2.576, 0.027605081232479203},
    {30, 1, 0.32530861542602985},  {30, 1.96, 0.05934231289605053},
    {30, 2.576, 0.015162993761018668},
};

TEST(StudentT, MatchesReferenceTable) {
  for (const auto& row : kTable) {
    EXPECT_NEAR(student_t_two_tailed_p(row.t, row.df), row.p, 1e-10)
        << "df=" << row.df << " t=" << row.t;
  }
  for (double df : {1, 2, 5, 10, 30}) EXPECT_EQ(student_t_two_tailed_p(0, df), 1.0);
}

TEST(StudentT, PublishedCriticalValuesGiveFivePercent) {
  // Printed two-tailed 0.05 critical values, three decimals.
  const std::pair<double, double> critical[] = {
      {1, 12.706}, {2, 4.303}, {5, 2.571}, {10, 2.228}, {30, 2.042}};
  for (auto [df, t] : critical) EXPECT_NEAR(student_t_two_tailed_p(t, df), 0.05, 1e-4) << df;
}

TEST(StudentT, LimitsAndErrors) {
  EXPECT_EQ(student_t_two_tailed_p(INFINITY, 3), 0.0);
  EXPECT_LT(student_t_two_tailed_p(50, 30), 1e-25);
  EXPECT_EQ(student_t_two_tailed_p(-1.96, 30), student_t_two_tailed_p(1.96, 30));
  EXPECT_THROW(student_t_two_tailed_p(1, 0), ArgumentError);
  EXPECT_THROW(student_t_two_tailed_p(NAN, 3), ArgumentError);
}

TEST(IncompleteBeta, KnownClosedForms) {
  // I_x(1, 1) = x and I_x(a, 1) = x^a.
  for (double x : {0.0, 0.1, 0.5, 0.93, 1.0}) {
    EXPECT_NEAR(regularized_incomplete_beta(1, 1, x), x, 1e-14);
    EXPECT_NEAR(regularized_incomplete_beta(3.5, 1, x), std::pow(x, 3.5), 1e-14);
  }
  // Symmetry I_x(a, b) = 1 - I_{1-x}(b, a).
  EXPECT_NEAR(regularized_incomplete_beta(2.5, 7, 0.3),
              1 - regularized_incomplete_beta(7, 2.5, 0.7), 1e-14);
  EXPECT_THROW(regularized_incomplete_beta(0, 1, 0.5), ArgumentError);
  EXPECT_THROW(regularized_incomplete_beta(1, 1, 1.5), ArgumentError);
}

TEST(PairedT, WorkedExample) {
  // d = [1, 2, 2, 3, 3]: mean 2.2, variance 0.7, t = 2.2 / sqrt(0.7 / 5).
  const std::vector<double> a{1, 2, 3, 4, 5}, b{0, 0, 1, 1, 2};
  auto r = paired_t_test(a, b);
  EXPECT_EQ(r.df, 4);
  EXPECT_NEAR(r.t, 2.2 / std::sqrt(0.7 / 5), 1e-12);
  EXPECT_NEAR(r.t, 5.879747322073337, 1e-12);
  // Between the printed df=4 critical values for 0.01 (4.604) and 0.001
  // (8.610).
  EXPECT_LT(r.p, 0.01);
  EXPECT_GT(r.p, 0.001);
  EXPECT_NEAR(r.p, 0.004181072135640301, 1e-12);
}

TEST(PairedT, IdenticalSamples) {
  const std::vector<double> a{3.5, 1, 9, 2};
  auto r = paired_t_test(a, a);
  EXPECT_EQ(r.t, 0);
  EXPECT_EQ(r.p, 1);
  EXPECT_EQ(r.df, 3);
}

TEST(PairedT, Errors) {
  const std::vector<double> one{1}, two{1, 2}, three{1, 2, 3};
  EXPECT_THROW(paired_t_test(one, one), ArgumentError);
  EXPECT_THROW(paired_t_test(two, three), ArgumentError);
  const std::vector<double> shifted{2, 3};
  EXPECT_THROW(paired_t_test(two, shifted), DegenerateVarianceError);
}

TEST(PairedT, AntisymmetryOverRandomPairs) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0, 3);
  std::uniform_int_distribution<size_t> len(2, 60);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> a(len(rng)), b;
    for (auto& x : a) x = n(rng);
    for (double x : a) b.push_back(x + n(rng) + 0.3);
    auto ab = paired_t_test(a, b), ba = paired_t_test(b, a);
    ASSERT_EQ(ab.t, -ba.t);
    ASSERT_NEAR(ab.p, ba.p, 1e-12);
    ASSERT_GE(ab.p, 0);
    ASSERT_LE(ab.p, 1);
  }
}

TEST(TwoSampleT, MatchesDirectPooledFormula) {
  const std::vector<double> a{4, 5, 7, 9}, b{1, 2, 2, 3, 6};
  // Means 6.25 and 2.8; SS 14.75 and 14.8; pooled variance 29.55 / 7.
  const double t = (6.25 - 2.8) / std::sqrt(29.55 / 7 * (0.25 + 0.2));
  auto r = two_sample_t_test(a, b);
  EXPECT_EQ(r.df, 7);
  EXPECT_NEAR(r.t, t, 1e-12);
  EXPECT_NEAR(r.p, student_t_two_tailed_p(t, 7), 1e-15);
  EXPECT_EQ(two_sample_t_test(b, a).t, -r.t);
  const std::vector<double> c{2, 2}, d{3, 3};
  EXPECT_THROW(two_sample_t_test(c, d), DegenerateVarianceError);
  EXPECT_EQ(two_sample_t_test(c, c).p, 1);
}

TEST(EffectSize, BandingIsAFunctionOfMagnitude) {
  const std::pair<double, EffectMagnitude> cases[] = {
      {0, EffectMagnitude::kNegligible},   {0.1999, EffectMagnitude::kNegligible},
      {0.2, EffectMagnitude::kSmall},      {0.4999, EffectMagnitude::kSmall},
      {0.5, EffectMagnitude::kMedium},     {0.7999, EffectMagnitude::kMedium},
      {0.8, EffectMagnitude::kLarge},      {3, EffectMagnitude::kLarge},
  };
  for (auto [d, m] : cases) {
    EXPECT_EQ(magnitude_of(d), m) << d;
    EXPECT_EQ(magnitude_of(-d), m) << -d;
  }
  EXPECT_EQ(magnitude_name(EffectMagnitude::kMedium), "medium");
}

TEST(EffectSize, IdenticalAndTranslatedSamples) {
  const std::vector<double> a{1, 4, 2, 8, 5}, b{3, 3, 1, 0, 2};
  auto same = cohens_d(a, a);
  EXPECT_EQ(same.d, 0);
  EXPECT_EQ(same.magnitude, EffectMagnitude::kNegligible);
  const double d = cohens_d(a, b).d;
  for (double c : {-100.0, 0.5, 1e4}) {
    std::vector<double> as, bs;
    for (double x : a) as.push_back(x + c);
    for (double x : b) bs.push_back(x + c);
    EXPECT_NEAR(cohens_d(as, bs).d, d, 1e-9);
  }
}

TEST(EffectSize, DegenerateVariance) {
  const std::vector<double> c{2, 2, 2}, e{5, 5};
  EXPECT_EQ(cohens_d(c, c).d, 0);
  EXPECT_THROW(cohens_d(c, e), DegenerateVarianceError);
  const std::vector<double> one{1};
  EXPECT_THROW(cohens_d(one, c), ArgumentError);
}

TEST(EffectSize, HalfSigmaShiftIsMedium) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n(10, 2);
  std::vector<double> a(10000), b(10000);
  for (auto& x : a) x = n(rng) + 0.5 * 2;
  for (auto& x : b) x = n(rng);
  // Direct evaluation of the pooled formula with long double sums.
  long double sa = 0, sb = 0;
  for (double x : a) sa += x;
  for (double x : b) sb += x;
  const long double ma = sa / 10000, mb = sb / 10000;
  long double va = 0, vb = 0;
  for (double x : a) va += (x - ma) * (x - ma);
  for (double x : b) vb += (x - mb) * (x - mb);
  const double direct = double((ma - mb) / std::sqrt((va + vb) / (10000 + 10000 - 2)));
  auto e = cohens_d(a, b);
  EXPECT_NEAR(e.d, direct, 1e-9);
  EXPECT_NEAR(e.d, 0.5, 0.05);
  EXPECT_EQ(e.magnitude, EffectMagnitude::kMedium);
}

TEST(EffectSize, PairedStandardizer) {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{0, 0, 1, 1, 2};
  EXPECT_NEAR(cohens_d_paired(a, b).d, 2.2 / std::sqrt(0.7), 1e-12);
  EXPECT_EQ(cohens_d_paired(a, a).d, 0);
}

}  // namespace
}  // namespace shiftlens
