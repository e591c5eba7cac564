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

#include "shiftlens/corpus.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <zlib.h>

#include "test_util.hpp"

namespace shiftlens {
namespace {

IngestResult ingest_string(const std::string& s, Source src = Source::kTwitterArchive) {
  std::istringstream in(s);
  return ingest_documents(in, src);
}

const char* kThreeRecords =
    R"({"id":"t1","text":"Doing #Yoga today https://x.co","created_at":"2020-07-01T09:00:00Z"})" "\n"
    R"({"id":"t2","text":"@sam pray for me","created_at":"2020-08-01T10:00:00Z","region":"London"})" "\n"
    R"({"id":"t3","text":"nothing much","created_at":"2020-10-01T00:00:00Z"})" "\n";

TEST(IngestTest, AcceptsValidRecords) {
  auto r = ingest_string(kThreeRecords);
  EXPECT_EQ(r.corpus.size(), 3u);
  EXPECT_EQ(r.report.accepted, 3u);
  EXPECT_EQ(r.report.rejected(), 0u);
  const Document& t1 = r.corpus.at("t1");
  EXPECT_EQ(t1.text_norm, "doing #yoga today ⟨url⟩");
  EXPECT_EQ(t1.tokens, tokenize(t1.text_norm));
  EXPECT_EQ(t1.source, Source::kTwitterArchive);
  EXPECT_EQ(r.corpus.at("t2").region, std::optional<std::string>("London"));
}

TEST(IngestTest, SkipsBadTimestamp) {
  auto r = ingest_string(
      R"({"id":"a","text":"x","created_at":"not-a-date"})" "\n"
      R"({"id":"b","text":"y","created_at":"2020-07-01"})" "\n");
  EXPECT_EQ(r.corpus.size(), 1u);
  EXPECT_EQ(r.report.bad_timestamp, 1u);
  EXPECT_EQ(r.report.rejected(), 1u);
}

TEST(IngestTest, CountsMissingFieldsMalformedAndDuplicates) {
  auto r = ingest_string(
      R"({"id":"a","text":"first","created_at":"2020-07-01"})" "\n"
      R"({"id":"a","text":"second","created_at":"2020-07-02"})" "\n"
      R"({"id":"b","created_at":"2020-07-01"})" "\n"
      R"({"id":"","text":"t","created_at":"2020-07-01"})" "\n"
      R"({"id":5,"text":"t","created_at":"2020-07-01"})" "\n"
      "{not json\n"
      "\n"
      "[1,2]\n");
  EXPECT_EQ(r.corpus.size(), 1u);
  EXPECT_EQ(r.corpus.at("a").text_raw, "first");
  EXPECT_EQ(r.report.duplicate_id, 1u);
  EXPECT_EQ(r.report.missing_field, 3u);
  EXPECT_EQ(r.report.malformed, 2u);
  EXPECT_EQ(r.report.total_records, 7u);
  EXPECT_EQ(r.report.accepted + r.report.rejected(), r.report.total_records);
}

TEST(IngestTest, UnreadableFileIsFatal) {
  EXPECT_THROW(ingest_documents(fs::path("/nonexistent/in.jsonl"), Source::kOther), IoError);
}

TEST(IngestTest, ReadsGzipByExtension) {
  testing::TempDir tmp;
  const auto path = tmp / "records.jsonl.gz";
  gzFile gz = gzopen(path.c_str(), "wb");
  ASSERT_NE(gz, nullptr);
  gzwrite(gz, kThreeRecords, static_cast<unsigned>(std::string(kThreeRecords).size()));
  gzclose(gz);
  auto r = ingest_documents(path, Source::kTwitterArchive);
  EXPECT_EQ(r.corpus.size(), 3u);
}

TEST(IngestTest, OrderIsDeterministicAndSorted) {
  // Same records, different arrival order.
  const std::string a =
      R"({"id":"z","text":"1","created_at":"2020-07-01T10:00:00Z"})" "\n"
      R"({"id":"y","text":"2","created_at":"2020-07-01T10:00:00Z"})" "\n"
      R"({"id":"x","text":"3","created_at":"2020-06-01T10:00:00Z"})" "\n";
  const std::string b =
      R"({"id":"x","text":"3","created_at":"2020-06-01T10:00:00Z"})" "\n"
      R"({"id":"z","text":"1","created_at":"2020-07-01T10:00:00Z"})" "\n"
      R"({"id":"y","text":"2","created_at":"2020-07-01T10:00:00Z"})" "\n";
  auto ids = [](const Corpus& c) {
    std::vector<std::string> out;
    for (const auto& d : c.documents()) out.push_back(d.id);
    return out;
  };
  EXPECT_EQ(ids(ingest_string(a).corpus), ids(ingest_string(b).corpus));
  EXPECT_EQ(ids(ingest_string(a).corpus), (std::vector<std::string>{"x", "y", "z"}));
}

TEST(CorpusDirTest, WriteReadRoundTrip) {
  testing::TempDir tmp;
  auto r = ingest_string(kThreeRecords);
  write_corpus_dir(tmp.path(), r.corpus, r.report);
  Corpus back = read_corpus_dir(tmp.path());
  ASSERT_EQ(back.size(), r.corpus.size());
  for (size_t i = 0; i < back.size(); ++i) {
    const auto& x = back.documents()[i];
    const auto& y = r.corpus.documents()[i];
    EXPECT_EQ(x.id, y.id);
    EXPECT_EQ(x.text_raw, y.text_raw);
    EXPECT_EQ(x.created_at, y.created_at);
    EXPECT_EQ(x.source, y.source);
    EXPECT_EQ(x.region, y.region);
    EXPECT_EQ(x.tokens, y.tokens);
  }
  auto manifest = json::parse(read_file(tmp / "manifest.json"));
  EXPECT_EQ(manifest["documents"], 3);
  EXPECT_EQ(manifest["periods"]["2020-07"], 1);
  EXPECT_EQ(manifest["rejected"]["total"], 0);
}

TEST(SliceTest, BoundariesAreInclusive) {
  auto r = ingest_string(
      R"({"id":"jul","text":"a","created_at":"2020-07-01T00:00:00Z"})" "\n"
      R"({"id":"aug","text":"b","created_at":"2020-08-01T12:00:00Z"})" "\n"
      R"({"id":"last","text":"c","created_at":"2020-09-30T23:59:59Z"})" "\n"
      R"({"id":"oct","text":"d","created_at":"2020-10-01T00:00:00Z"})" "\n"
      R"({"id":"jun","text":"e","created_at":"2020-06-30T23:59:59Z"})" "\n");
  auto s = slice_by_period(r.corpus, require_date("2020-07-01"), require_date("2020-09-30"), "q3");
  EXPECT_EQ(s.doc_ids, (std::vector<std::string>{"jul", "aug", "last"}));
  EXPECT_EQ(s.days(), 92);
}

TEST(SliceTest, EmptyCorpusAndBadRange) {
  Corpus empty;
  auto s = slice_by_period(empty, require_date("2020-07-01"), require_date("2020-07-31"), "x");
  EXPECT_TRUE(s.doc_ids.empty());
  EXPECT_THROW(slice_by_period(empty, require_date("2020-08-01"), require_date("2020-07-31"), "x"),
               ArgumentError);
}

TEST(SliceTest, DisjointCoveringSlicesPartitionTheCorpus) {
  std::string records;
  for (int i = 0; i < 300; ++i) {
    const int month = 7 + i % 3;
    const int day = 1 + (i * 7) % 28;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  R"({"id":"d%03d","text":"t","created_at":"2020-%02d-%02dT%02d:00:00Z"})" "\n",
                  i, month, day, i % 24);
    records += buf;
  }
  auto r = ingest_string(records);
  std::multiset<std::string> seen;
  for (auto [a, b] : {std::pair{"2020-07-01", "2020-07-15"}, {"2020-07-16", "2020-08-31"},
                      {"2020-09-01", "2020-09-30"}}) {
    for (const auto& id : slice_by_period(r.corpus, require_date(a), require_date(b), "p").doc_ids) {
      seen.insert(id);
    }
  }
  EXPECT_EQ(seen.size(), r.corpus.size());
  for (const auto& d : r.corpus.documents()) EXPECT_EQ(seen.count(d.id), 1u);
}

class DailyCountsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::string records;
    for (int i = 0; i < 10; ++i) {
      records += R"({"id":"d)" + std::to_string(i) + R"(","text":"t","created_at":"2020-07-0)" +
                 std::to_string(1 + i % 3) + R"(T08:00:00Z"})" "\n";
    }
    corpus_ = ingest_string(records).corpus;
    slice_ = slice_by_period(corpus_, require_date("2020-07-01"), require_date("2020-09-30"), "2020-q3");
  }
  Corpus corpus_;
  PeriodSlice slice_;
};

TEST_F(DailyCountsTest, ThreeMatchesOnOneDay) {
  auto s = daily_counts(corpus_, slice_, {"d0", "d3", "d6"}, "yoga");
  ASSERT_EQ(s.day_counts.size(), 92u);
  EXPECT_EQ(s.day_counts[0].count, 3u);
  size_t zero_days = 0;
  for (const auto& d : s.day_counts) zero_days += d.count == 0;
  EXPECT_EQ(zero_days, 91u);
  EXPECT_EQ(format_date(s.day_counts.back().date), "2020-09-30");
}

TEST_F(DailyCountsTest, ConservationAndEmpty) {
  auto all = daily_counts(corpus_, slice_, slice_.doc_ids, "yoga");
  EXPECT_EQ(all.total(), slice_.doc_ids.size());
  auto none = daily_counts(corpus_, slice_, {}, "yoga");
  EXPECT_EQ(none.total(), 0u);
  EXPECT_EQ(none.day_counts.size(), 92u);
  // Duplicate ids count once.
  EXPECT_EQ(daily_counts(corpus_, slice_, {"d1", "d1"}, "yoga").total(), 1u);
}

TEST_F(DailyCountsTest, RejectsIdsOutsideSlice) {
  EXPECT_THROW(daily_counts(corpus_, slice_, {"nope"}, "yoga"), ArgumentError);
}

TEST_F(DailyCountsTest, SeriesCsvRoundTrip) {
  testing::TempDir tmp;
  auto s = daily_counts(corpus_, slice_, {"d0", "d1", "d2"}, "yoga");
  write_file_atomic(tmp / "s.csv", series_csv(s));
  auto back = read_series_csv(tmp / "s.csv");
  EXPECT_EQ(back.activity, "yoga");
  EXPECT_EQ(back.period_label, "2020-q3");
  ASSERT_EQ(back.day_counts.size(), s.day_counts.size());
  EXPECT_EQ(back.values(), s.values());
}

}  // namespace
}  // namespace shiftlens
