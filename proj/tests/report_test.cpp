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

#include "shiftlens/report.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

namespace shiftlens {
namespace {

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

TokenCounts random_counts(uint64_t seed, int vocab, int tokens) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> w(0, vocab - 1);
  TokenCounts c;
  for (int i = 0; i < tokens; ++i) ++c["w" + std::to_string(w(rng))];
  return c;
}

TEST(WordCloud, AtMostNRowsAndNonIncreasing) {
  auto r = log_odds_dirichlet(random_counts(1, 400, 20000), random_counts(2, 400, 20000), 1000, 0);
  for (size_t n : {1u, 10u, 100u}) {
    auto rows = lines_of(emit_wordcloud_weights(r, n));
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows[0], "token,weight");
    EXPECT_LE(rows.size() - 1, n);
    double prev = INFINITY;
    for (size_t i = 1; i < rows.size(); ++i) {
      const double w = std::stod(rows[i].substr(rows[i].find(',') + 1));
      EXPECT_GT(w, 0);
      EXPECT_LE(w, prev);
      prev = w;
    }
  }
}

TEST(WordCloud, IdenticalCorporaGiveEmptyFile) {
  auto c = random_counts(3, 50, 2000);
  EXPECT_EQ(emit_wordcloud_weights(log_odds_dirichlet(c, c, 1000, 0), 100), "token,weight\n");
}

TEST(WordCloud, SidesArePartitionedBySign) {
  TokenCounts a = random_counts(4, 60, 5000), b = random_counts(5, 60, 5000);
  a["planted"] += 400;
  auto ab = lines_of(emit_wordcloud_weights(log_odds_dirichlet(a, b, 1000, 0), 1000));
  auto ba = lines_of(emit_wordcloud_weights(log_odds_dirichlet(b, a, 1000, 0), 1000));
  EXPECT_EQ(ab[1].substr(0, ab[1].find(',')), "planted");
  for (size_t i = 1; i < ba.size(); ++i) {
    EXPECT_NE(ba[i].substr(0, ba[i].find(',')), "planted");
  }
}

TEST(WordCloud, RejectsZeroN) {
  auto c = random_counts(6, 10, 100);
  EXPECT_THROW(emit_wordcloud_weights(log_odds_dirichlet(c, c, 10, 0), 0), ArgumentError);
}

class PlotDataTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::string records;
    const char* days[] = {"2019-07-03", "2019-08-15", "2020-07-03", "2020-07-03", "2020-09-30"};
    int i = 0;
    for (const char* d : days) {
      records += R"({"id":"p)" + std::to_string(i++) + R"(","text":"x","created_at":")" +
                 std::string(d) + R"(T12:00:00Z"})" "\n";
    }
    std::istringstream in(records);
    corpus_ = ingest_documents(in, Source::kTwitterArchive).corpus;
    pre_slice_ = slice_by_period(corpus_, require_date("2019-07-01"), require_date("2019-09-30"), "pre");
    during_slice_ =
        slice_by_period(corpus_, require_date("2020-07-01"), require_date("2020-09-30"), "during");
  }
  Corpus corpus_;
  PeriodSlice pre_slice_, during_slice_;
};

TEST_F(PlotDataTest, QuarterGives92ZeroFilledRows) {
  auto pre = daily_counts(corpus_, pre_slice_, pre_slice_.doc_ids, "x");
  auto during = daily_counts(corpus_, during_slice_, during_slice_.doc_ids, "x");
  auto rows = lines_of(emit_plot_data(pre, during));
  ASSERT_EQ(rows.size(), 93u);
  EXPECT_EQ(rows[0], "day_offset,date_pre,count_pre,date_during,count_during");
  EXPECT_EQ(rows[1], "0,2019-07-01,0,2020-07-01,0");
  EXPECT_EQ(rows[3], "2,2019-07-03,1,2020-07-03,2");
  EXPECT_EQ(rows[92], "91,2019-09-30,0,2020-09-30,1");
  int zero_rows = 0;
  for (size_t i = 1; i < rows.size(); ++i) {
    auto f = rows[i];
    const auto c1 = f.find(',', f.find(',') + 1);
    const auto c2 = f.find(',', c1 + 1), c3 = f.rfind(',');
    zero_rows += f.substr(c1 + 1, c2 - c1 - 1) == "0" && f.substr(c3 + 1) == "0";
  }
  EXPECT_EQ(zero_rows, 89);
}

TEST_F(PlotDataTest, BitStableAcrossCalls) {
  auto pre = daily_counts(corpus_, pre_slice_, pre_slice_.doc_ids, "x");
  auto during = daily_counts(corpus_, during_slice_, during_slice_.doc_ids, "x");
  EXPECT_EQ(emit_plot_data(pre, during), emit_plot_data(pre, during));
}

TEST_F(PlotDataTest, MisalignedSeriesRejected) {
  auto pre = daily_counts(corpus_, pre_slice_, {}, "x");
  auto july = slice_by_period(corpus_, require_date("2020-07-01"), require_date("2020-07-31"), "j");
  auto during = daily_counts(corpus_, july, {}, "x");
  EXPECT_THROW(emit_plot_data(pre, during), ArgumentError);
}

}  // namespace
}  // namespace shiftlens
