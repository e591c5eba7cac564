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

#include "shiftlens/pipeline.hpp"

#include <gtest/gtest.h>

#include <map>

#include "test_util.hpp"

namespace shiftlens {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

const fs::path kBundled = fs::path(SHIFTLENS_SOURCE_DIR) / "data" / "synthetic";

nlohmann::json bundled_json() {
  return nlohmann::json::parse(read_file(kBundled / "pipeline.json"));
}

PipelineConfig config_in(const fs::path& out, nlohmann::json j = bundled_json()) {
  auto c = parse_pipeline_config(j, kBundled);
  c.output_dir = out;
  return c;
}

// Relative path -> bytes for every regular file under root.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  }
  return out;
}

nlohmann::json without_timings(nlohmann::json m) {
  m.erase("timings");
  return m;
}

std::string status_of(const nlohmann::json& manifest, const std::string& stage) {
  for (const auto& s : manifest.at("stages")) {
    if (s.at("name") == stage) return s.at("status");
  }
  return "";
}

// One full run of the bundled config, shared by the read-only checks.
class BundledRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    outcome_ = new RunOutcome(run_pipeline(config_in(dir_->path())));
  }
  static void TearDownTestSuite() {
    delete outcome_;
    delete dir_;
  }
  static TempDir* dir_;
  static RunOutcome* outcome_;
};
TempDir* BundledRun::dir_ = nullptr;
RunOutcome* BundledRun::outcome_ = nullptr;

TEST_F(BundledRun, CompletesWithSevenStages) {
  ASSERT_EQ(outcome_->exit_code, kExitOk) << outcome_->message;
  const auto& m = outcome_->manifest;
  ASSERT_EQ(m.at("stages").size(), 7u);
  for (size_t i = 0; i < 7; ++i) {
    EXPECT_EQ(m["stages"][i]["name"], pipeline_stages()[i]);
    EXPECT_EQ(m["stages"][i]["status"], "ok");
    EXPECT_FALSE(m["stages"][i]["outputs"].empty());
  }
  EXPECT_EQ(m["format"], "shiftlens-run");
  EXPECT_EQ(m["seeds"]["global"], 13);
  EXPECT_TRUE(m["failed_stage"].is_null());
  EXPECT_EQ(m["timings"].size(), 7u);
}

TEST_F(BundledRun, ManifestListsEveryFileWithItsHash) {
  const auto files = tree(dir_->path());
  std::map<std::string, std::string> listed;
  for (const auto& s : outcome_->manifest["stages"]) {
    for (const auto& o : s["outputs"]) listed[o["path"]] = o["sha256"];
  }
  EXPECT_FALSE(files.count(".lock"));
  for (const auto& [rel, bytes] : files) {
    if (rel == "manifest.json") continue;
    ASSERT_TRUE(listed.count(rel)) << rel;
    EXPECT_EQ(listed[rel], sha256_hex(bytes)) << rel;
  }
  EXPECT_EQ(listed.size() + 1, files.size());
}

TEST_F(BundledRun, JsonReportsCarryTheConfigHash) {
  const std::string h = outcome_->manifest["config_hash"];
  EXPECT_EQ(h, config_hash(bundled_json()));
  for (const char* rel : {"shift/perplexity.json", "shift/frequency.json", "shift/lexical.json",
                          "survey/net_change.json", "survey/demographics.json",
                          "retrieval/prayer.json", "lm/2019-07-perplexity.json"}) {
    auto j = nlohmann::json::parse(read_file(dir_->path() / rel));
    EXPECT_EQ(j.value("config_hash", ""), h) << rel;
  }
}

TEST_F(BundledRun, PlantedDirectionsSurface) {
  auto freq = nlohmann::json::parse(read_file(dir_->path() / "shift/frequency.json"));
  int prayer_more = 0, yoga_less = 0;
  for (const auto& r : freq["results"]) {
    prayer_more += r["activity"] == "prayer" && r["direction"] == "more";
    yoga_less += r["activity"] == "yoga" && r["direction"] == "less";
  }
  EXPECT_EQ(prayer_more, 3);
  EXPECT_EQ(yoga_less, 3);
  auto pp = nlohmann::json::parse(read_file(dir_->path() / "shift/perplexity.json"));
  for (const auto& r : pp["results"]) {
    if (r["activity"] == "prayer" && r["modality"] == "online") {
      EXPECT_EQ(r["direction"], "more");
      EXPECT_TRUE(r["significant"].get<bool>());
    }
  }
}

TEST_F(BundledRun, RerunIsByteIdenticalExceptTimings) {
  TempDir other;
  auto again = run_pipeline(config_in(other.path()));
  ASSERT_EQ(again.exit_code, kExitOk);
  auto a = tree(dir_->path()), b = tree(other.path());
  ASSERT_EQ(a.size(), b.size());
  for (const auto& [rel, bytes] : a) {
    if (rel == "manifest.json") continue;
    EXPECT_EQ(bytes, b[rel]) << rel;
  }
  EXPECT_EQ(without_timings(nlohmann::json::parse(a["manifest.json"])),
            without_timings(nlohmann::json::parse(b["manifest.json"])));
}

TEST(Pipeline, MissingSeedCorpusFailsValidationBeforeAnyStage) {
  TempDir dir;
  auto j = bundled_json();
  j["activities"][0]["seed_corpus"] = {{"path", "does-not-exist.jsonl"}};
  auto out = run_pipeline(config_in(dir / "out", j));
  EXPECT_EQ(out.exit_code, kExitValidation);
  EXPECT_NE(out.message.find("seed corpus"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Pipeline, OtherValidationErrors) {
  TempDir dir;
  auto unequal = bundled_json();
  unequal["periods"][0]["during"]["end"] = "2020-07-30";
  EXPECT_EQ(run_pipeline(config_in(dir / "a", unequal)).exit_code, kExitValidation);

  auto bare = bundled_json();
  bare["activities"].push_back({{"name", "knitting"}});
  EXPECT_EQ(run_pipeline(config_in(dir / "b", bare)).exit_code, kExitValidation);

  auto tau = bundled_json();
  tau["activities"][0]["threshold"] = 1.5;
  EXPECT_EQ(run_pipeline(config_in(dir / "c", tau)).exit_code, kExitValidation);

  auto stage = RunOptions{};
  stage.from_stage = "bogus";
  EXPECT_EQ(run_pipeline(config_in(dir / "d"), stage).exit_code, kExitValidation);

  auto missing_key = bundled_json();
  missing_key.erase("periods");
  EXPECT_THROW(parse_pipeline_config(missing_key, kBundled), ValidationError);
}

TEST(Pipeline, ConfigHashIgnoresOutputDir) {
  auto a = bundled_json(), b = bundled_json();
  b["output_dir"] = "/elsewhere";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b["seed"] = 14;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Pipeline, ResumeReproducesDownstreamOutputs) {
  TempDir dir;
  const auto cfg = config_in(dir.path());
  ASSERT_EQ(run_pipeline(cfg).exit_code, kExitOk);
  const auto before = tree(dir.path());
  fs::remove_all(dir / "shift");
  fs::remove_all(dir / "survey");

  RunOptions opts;
  opts.from_stage = "shift";
  auto out = run_pipeline(cfg, opts);
  ASSERT_EQ(out.exit_code, kExitOk) << out.message;
  for (const char* s : {"ingest", "embed", "retrieve", "daily_counts", "lm"}) {
    EXPECT_EQ(status_of(out.manifest, s), "reused") << s;
  }
  EXPECT_EQ(status_of(out.manifest, "shift"), "ok");
  const auto after = tree(dir.path());
  ASSERT_EQ(before.size(), after.size());
  for (const auto& [rel, bytes] : before) {
    if (rel == "manifest.json") continue;
    EXPECT_EQ(bytes, after.at(rel)) << rel;
  }
}

TEST(Pipeline, ResumeRejectsTamperedOrForeignArtifacts) {
  TempDir dir;
  const auto cfg = config_in(dir.path());
  ASSERT_EQ(run_pipeline(cfg).exit_code, kExitOk);
  RunOptions opts;
  opts.from_stage = "lm";

  auto other = bundled_json();
  other["seed"] = 99;
  EXPECT_EQ(run_pipeline(config_in(dir.path(), other), opts).exit_code, kExitValidation);

  write_file_atomic(dir / "counts/prayer-2019-07.csv", "tampered\n");
  auto out = run_pipeline(cfg, opts);
  EXPECT_EQ(out.exit_code, kExitValidation);
  EXPECT_NE(out.message.find("counts/prayer-2019-07.csv"), std::string::npos);

  TempDir empty;
  EXPECT_EQ(run_pipeline(config_in(empty.path()), opts).exit_code, kExitValidation);
}

TEST(Pipeline, LockFileBlocksASecondRun) {
  TempDir dir;
  write_file_atomic(dir / ".lock", "");
  auto out = run_pipeline(config_in(dir.path()));
  EXPECT_EQ(out.exit_code, kExitValidation);
  EXPECT_NE(out.message.find("locked"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / ".lock"));
  EXPECT_FALSE(fs::exists(dir / "manifest.json"));

  fs::remove(dir / ".lock");
  EXPECT_EQ(run_pipeline(config_in(dir.path())).exit_code, kExitOk);
  EXPECT_FALSE(fs::exists(dir / ".lock"));
}

TEST(Pipeline, StageFailureIsRecordedAndEarlierOutputsKept) {
  TempDir dir;
  write_file_atomic(dir / "bad.jsonl", "{not json\n");
  auto j = bundled_json();
  j["logprobs"] = (dir / "bad.jsonl").string();
  auto out = run_pipeline(config_in(dir / "out", j));
  EXPECT_EQ(out.exit_code, kExitStageFailure);
  EXPECT_EQ(out.failed_stage, "shift");

  auto m = nlohmann::json::parse(read_file(dir / "out/manifest.json"));
  EXPECT_EQ(m["failed_stage"], "shift");
  EXPECT_EQ(status_of(m, "lm"), "ok");
  EXPECT_EQ(status_of(m, "shift"), "failed");
  EXPECT_EQ(status_of(m, "survey"), "not_run");
  for (const auto& s : m["stages"]) {
    if (s["status"] != "ok") continue;
    for (const auto& o : s["outputs"]) {
      const fs::path p = dir / "out" / o["path"].get<std::string>();
      ASSERT_TRUE(fs::exists(p)) << p;
      EXPECT_EQ(sha256_file(p), o["sha256"]);
    }
  }
}

TEST(Pipeline, SurveyIsSkippedWhenNotConfigured) {
  TempDir dir;
  auto j = bundled_json();
  j.erase("survey");
  auto out = run_pipeline(config_in(dir.path(), j));
  ASSERT_EQ(out.exit_code, kExitOk);
  EXPECT_EQ(status_of(out.manifest, "survey"), "skipped");
  EXPECT_FALSE(fs::exists(dir / "survey"));
}

TEST(Pipeline, SlugIsFilesystemSafe) {
  EXPECT_EQ(slug("corporate worship"), "corporate-worship");
  EXPECT_EQ(slug("Reflection on Nature"), "reflection-on-nature");
}

}  // namespace
}  // namespace shiftlens
