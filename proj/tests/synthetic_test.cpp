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

#include "shiftlens/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

namespace shiftlens {
namespace {

SynthSpec two_topic_spec() {
  SynthSpec spec;
  spec.periods = {{"p1", require_date("2019-07-01"), require_date("2019-09-30"), 10000},
                  {"p2", require_date("2020-07-01"), require_date("2020-09-30"), 12000}};
  SynthTopic a{"A", {"yoga", "mat", "stretch", "pose", "breath"}, 1.0, {{"p2", 2.0}}, {}};
  SynthTopic b{"B", {"tax", "return", "invoice", "ledger", "audit", "refund"}, 4.0, {}, {}};
  spec.topics = {a, b};
  return spec;
}

// Central interval of Binomial(n, p) holding at least 1 - alpha of the mass,
// from the exact pmf.
std::pair<long, long> binomial_interval(long n, double p, double alpha) {
  auto log_pmf = [&](long k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
           k * std::log(p) + (n - k) * std::log1p(-p);
  };
  double cdf = 0;
  long lo = 0;
  while (cdf + std::exp(log_pmf(lo)) < alpha / 2) cdf += std::exp(log_pmf(lo++));
  double upper_tail = 0;
  long hi = n;
  while (upper_tail + std::exp(log_pmf(hi)) < alpha / 2) upper_tail += std::exp(log_pmf(hi--));
  return {lo, hi};
}

TEST(SyntheticTest, DeterministicGivenSeed) {
  const auto spec = two_topic_spec();
  const auto x = generate_synthetic_corpus(spec, 42);
  const auto y = generate_synthetic_corpus(spec, 42);
  EXPECT_EQ(synthetic_records(x), synthetic_records(y));
  EXPECT_EQ(synthetic_labels_tsv(x), synthetic_labels_tsv(y));
  EXPECT_NE(synthetic_records(x), synthetic_records(generate_synthetic_corpus(spec, 43)));
}

TEST(SyntheticTest, PlantedRateMultiplierWithinBinomialNoise) {
  const auto spec = two_topic_spec();
  const auto s = generate_synthetic_corpus(spec, 13);
  long a1 = 0, a2 = 0;
  for (const auto& d : s.corpus.documents()) {
    if (s.labels.at(d.id) != "A") continue;
    (d.created_at < Timestamp{require_date("2020-01-01")} ? a1 : a2)++;
  }
  // p1 = 1/5, p2 = 2/6: expected A counts 2000 and 4000.
  const auto [lo1, hi1] = binomial_interval(10000, 0.2, 1e-4);
  const auto [lo2, hi2] = binomial_interval(12000, 1.0 / 3.0, 1e-4);
  EXPECT_GE(a1, lo1);
  EXPECT_LE(a1, hi1);
  EXPECT_GE(a2, lo2);
  EXPECT_LE(a2, hi2);
  const double ratio = static_cast<double>(a2) / a1;
  EXPECT_GT(ratio, static_cast<double>(lo2) / hi1);
  EXPECT_LT(ratio, static_cast<double>(hi2) / lo1);
}

TEST(SyntheticTest, DisjointVocabulariesShareNoTokens) {
  const auto s = generate_synthetic_corpus(two_topic_spec(), 5);
  std::set<std::string> a_tokens, b_tokens;
  for (const auto& d : s.corpus.documents()) {
    auto& target = s.labels.at(d.id) == "A" ? a_tokens : b_tokens;
    target.insert(d.tokens.begin(), d.tokens.end());
  }
  for (const auto& t : a_tokens) EXPECT_EQ(b_tokens.count(t), 0u) << t;
}

TEST(SyntheticTest, DocumentsStayInsideTheirPeriod) {
  const auto spec = two_topic_spec();
  const auto s = generate_synthetic_corpus(spec, 9);
  EXPECT_EQ(s.corpus.size(), 22000u);
  for (const auto& d : s.corpus.documents()) {
    const Date day = date_of(d.created_at);
    const bool in_p1 = day >= spec.periods[0].start && day <= spec.periods[0].end;
    const bool in_p2 = day >= spec.periods[1].start && day <= spec.periods[1].end;
    EXPECT_TRUE(in_p1 || in_p2);
    EXPECT_GE(d.tokens.size(), spec.min_tokens);
    EXPECT_LE(d.tokens.size(), spec.max_tokens);
  }
}

TEST(SyntheticTest, InsertionsPlantPhrases) {
  auto spec = two_topic_spec();
  spec.topics[0].insertions.push_back({"p2", "via zoom", 1.0});
  const auto s = generate_synthetic_corpus(spec, 3);
  for (const auto& d : s.corpus.documents()) {
    const bool has = d.text_norm.find("via zoom") != std::string::npos;
    const bool expect = s.labels.at(d.id) == "A" && d.created_at >= Timestamp{require_date("2020-01-01")};
    EXPECT_EQ(has, expect) << d.id;
  }
}

TEST(SyntheticTest, RejectsEmptyVocabulary) {
  auto spec = two_topic_spec();
  spec.topics[1].vocabulary.clear();
  EXPECT_THROW(generate_synthetic_corpus(spec, 1), ArgumentError);
}

TEST(SyntheticTest, ParsesJsonSpec) {
  auto j = nlohmann::json::parse(R"({
    "id_prefix": "x", "min_tokens": 3, "max_tokens": 4,
    "periods": [{"label": "p", "start": "2020-07-01", "end": "2020-07-31", "documents": 10}],
    "topics": [{"name": "t", "vocabulary": ["a", "b"], "multipliers": {"p": 2.0},
                "insertions": [{"period": "p", "phrase": "i pray", "probability": 0.5}]}]
  })");
  auto spec = synth_spec_from_json(j);
  EXPECT_EQ(spec.id_prefix, "x");
  EXPECT_EQ(spec.periods.at(0).documents, 10u);
  EXPECT_DOUBLE_EQ(spec.topics.at(0).rate_in("p"), 2.0);
  EXPECT_EQ(generate_synthetic_corpus(spec, 1).corpus.size(), 10u);
}

}  // namespace
}  // namespace shiftlens
