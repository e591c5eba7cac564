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

#ifndef SHIFTLENS_CORPUS_HPP_
#define SHIFTLENS_CORPUS_HPP_

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "shiftlens/date.hpp"
#include "shiftlens/error.hpp"
#include "shiftlens/io.hpp"
#include "shiftlens/text.hpp"

namespace shiftlens {

using json = nlohmann::json;

enum class Source { kTwitterArchive, kRedditArchive, kSynthetic, kOther };

inline std::string_view source_name(Source s) {
  switch (s) {
    case Source::kTwitterArchive: return "twitter-archive";
    case Source::kRedditArchive: return "reddit-archive";
    case Source::kSynthetic: return "synthetic";
    case Source::kOther: return "other";
  }
  return "other";
}

inline Source parse_source(std::string_view s) {
  if (s == "twitter-archive") return Source::kTwitterArchive;
  if (s == "reddit-archive") return Source::kRedditArchive;
  if (s == "synthetic") return Source::kSynthetic;
  if (s == "other") return Source::kOther;
  throw ArgumentError("unknown source tag '" + std::string(s) + "'");
}

struct Document {
  std::string id;
  std::string text_raw;
  std::string text_norm;
  TokenSequence tokens;
  Timestamp created_at;
  Source source = Source::kOther;
  std::optional<std::string> region;
};

// Builds a document with normalized text and tokens derived from `raw`.
inline Document make_document(std::string id, std::string raw, Timestamp created_at,
                              Source source,
                              std::optional<std::string> region = std::nullopt) {
  Document doc;
  doc.id = std::move(id);
  doc.text_raw = std::move(raw);
  doc.text_norm = normalize_text(doc.text_raw);
  doc.tokens = tokenize(doc.text_norm);
  doc.created_at = created_at;
  doc.source = source;
  doc.region = std::move(region);
  return doc;
}

// Immutable, id-indexed document collection ordered by (created_at, id).
class Corpus {
 public:
  Corpus() = default;

  explicit Corpus(std::vector<Document> docs) : docs_(std::move(docs)) {
    std::sort(docs_.begin(), docs_.end(), [](const Document& a, const Document& b) {
      return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id);
    });
    index_.reserve(docs_.size());
    for (size_t i = 0; i < docs_.size(); ++i) {
      if (docs_[i].id.empty()) throw ArgumentError("document with empty id");
      if (!index_.emplace(docs_[i].id, i).second) {
        throw ArgumentError("duplicate document id '" + docs_[i].id + "'");
      }
    }
  }

  const std::vector<Document>& documents() const { return docs_; }
  size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }

  const Document* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &docs_[it->second];
  }

  const Document& at(std::string_view id) const {
    const Document* d = find(id);
    if (d == nullptr) throw ArgumentError("unknown document id '" + std::string(id) + "'");
    return *d;
  }

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, size_t> index_;
};

struct IngestReport {
  size_t total_records = 0;
  size_t accepted = 0;
  size_t malformed = 0;       // not a JSON object
  size_t missing_field = 0;   // id, text or created_at absent, empty or mistyped
  size_t bad_timestamp = 0;   // created_at is not ISO-8601
  size_t duplicate_id = 0;    // later occurrence of an id; first one wins

  size_t rejected() const {
    return malformed + missing_field + bad_timestamp + duplicate_id;
  }
};

struct IngestResult {
  Corpus corpus;
  IngestReport report;
};

// Accumulates line-delimited JSON records. Blank lines are ignored.
class CorpusBuilder {
 public:
  explicit CorpusBuilder(Source source) : source_(source) {}

  void add_line(std::string_view line) {
    if (std::all_of(line.begin(), line.end(),
                    [](char c) { return detail::is_ascii_space(c); })) {
      return;
    }
    ++report_.total_records;
    json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (rec.is_discarded() || !rec.is_object()) {
      ++report_.malformed;
      return;
    }
    auto str_field = [&](const char* key) -> const std::string* {
      auto it = rec.find(key);
      if (it == rec.end() || !it->is_string()) return nullptr;
      return it->get_ptr<const std::string*>();
    };
    const std::string* id = str_field("id");
    const std::string* text = str_field("text");
    const std::string* created = str_field("created_at");
    if (id == nullptr || id->empty() || text == nullptr || created == nullptr) {
      ++report_.missing_field;
      return;
    }
    auto ts = parse_timestamp(*created);
    if (!ts) {
      ++report_.bad_timestamp;
      return;
    }
    if (!seen_.insert(*id).second) {
      ++report_.duplicate_id;
      return;
    }
    std::optional<std::string> region;
    if (const std::string* r = str_field("region")) region = *r;
    Source source = source_;
    if (const std::string* s = str_field("source")) {
      try {
        source = parse_source(*s);
      } catch (const ArgumentError&) {
        // Unknown per-record tags fall back to the stream's tag.
      }
    }
    docs_.push_back(make_document(*id, *text, *ts, source, std::move(region)));
    ++report_.accepted;
  }

  IngestResult build() && {
    return IngestResult{Corpus(std::move(docs_)), report_};
  }

 private:
  Source source_;
  std::vector<Document> docs_;
  std::unordered_set<std::string> seen_;
  IngestReport report_;
};

inline IngestResult ingest_documents(std::istream& in, Source source) {
  CorpusBuilder builder(source);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    builder.add_line(line);
  }
  if (in.bad()) throw IoError("read error in record stream");
  return std::move(builder).build();
}

// Reads a JSONL file (gzip if the name ends in ".gz").
inline IngestResult ingest_documents(const fs::path& path, Source source) {
  CorpusBuilder builder(source);
  for_each_line(path, [&](std::string_view line) { builder.add_line(line); });
  return std::move(builder).build();
}

// Per-month document counts, keyed "YYYY-MM".
inline std::map<std::string, size_t> counts_by_month(const Corpus& corpus) {
  std::map<std::string, size_t> out;
  for (const auto& d : corpus.documents()) ++out[month_label(date_of(d.created_at))];
  return out;
}

inline json document_record(const Document& d) {
  json rec = {{"id", d.id},
              {"text", d.text_raw},
              {"created_at", format_timestamp(d.created_at)},
              {"source", source_name(d.source)}};
  if (d.region) rec["region"] = *d.region;
  return rec;
}

inline json ingest_manifest(const Corpus& corpus, const IngestReport& report) {
  json periods = json::object();
  for (const auto& [month, n] : counts_by_month(corpus)) periods[month] = n;
  return {{"format", "shiftlens-corpus"},
          {"version", 1},
          {"documents", corpus.size()},
          {"periods", periods},
          {"records", report.total_records},
          {"accepted", report.accepted},
          {"rejected",
           {{"total", report.rejected()},
            {"malformed", report.malformed},
            {"missing_field", report.missing_field},
            {"bad_timestamp", report.bad_timestamp},
            {"duplicate_id", report.duplicate_id}}}};
}

// A corpus directory holds documents.jsonl (in corpus order) and
// manifest.json.
inline void write_corpus_dir(const fs::path& dir, const Corpus& corpus,
                             const IngestReport& report) {
  std::string body;
  for (const auto& d : corpus.documents()) {
    body += document_record(d).dump();
    body.push_back('\n');
  }
  write_file_atomic(dir / "documents.jsonl", body);
  write_file_atomic(dir / "manifest.json", ingest_manifest(corpus, report).dump(2) + "\n");
}

// Strict reader: a corpus directory written by write_corpus_dir() never has
// rejects, so any bad record is a format error.
inline Corpus read_corpus_dir(const fs::path& dir) {
  const fs::path file = dir / "documents.jsonl";
  if (!fs::exists(file)) throw IoError("no documents.jsonl in " + dir.string());
  CorpusBuilder builder(Source::kOther);
  for_each_line(file, [&](std::string_view line) { builder.add_line(line); });
  IngestResult r = std::move(builder).build();
  if (r.report.rejected() != 0) {
    throw FormatError(file.string() + ": " + std::to_string(r.report.rejected()) +
                      " invalid records");
  }
  return std::move(r.corpus);
}

// Documents whose UTC timestamp falls on a day in [start, end].
struct PeriodSlice {
  std::string label;
  Date start;
  Date end;
  std::vector<std::string> doc_ids;

  long days() const { return days_inclusive(start, end); }
};

inline PeriodSlice slice_by_period(const Corpus& corpus, Date start, Date end,
                                   std::string label) {
  if (start > end) {
    throw ArgumentError("slice '" + label + "': start " + format_date(start) +
                        " is after end " + format_date(end));
  }
  PeriodSlice slice{std::move(label), start, end, {}};
  const Timestamp lo{start};
  const Timestamp hi{end + std::chrono::days{1}};
  const auto& docs = corpus.documents();
  auto first = std::lower_bound(docs.begin(), docs.end(), lo,
                                [](const Document& d, Timestamp t) { return d.created_at < t; });
  for (auto it = first; it != docs.end() && it->created_at < hi; ++it) {
    slice.doc_ids.push_back(it->id);
  }
  return slice;
}

// Token sequences of the slice's documents, in slice order.
inline std::vector<TokenSequence> slice_tokens(const Corpus& corpus, const PeriodSlice& slice) {
  std::vector<TokenSequence> out;
  out.reserve(slice.doc_ids.size());
  for (const auto& id : slice.doc_ids) out.push_back(corpus.at(id).tokens);
  return out;
}

// Ids from `ids` that belong to the slice, in slice order.
inline std::vector<std::string> restrict_to_slice(const PeriodSlice& slice,
                                                  const std::vector<std::string>& ids) {
  std::unordered_set<std::string_view> wanted(ids.begin(), ids.end());
  std::vector<std::string> out;
  for (const auto& id : slice.doc_ids) {
    if (wanted.count(id)) out.push_back(id);
  }
  return out;
}

struct DayCount {
  Date date;
  uint64_t count = 0;
};

struct FrequencySeries {
  std::string activity;
  std::string period_label;
  std::vector<DayCount> day_counts;  // contiguous, one entry per day

  uint64_t total() const {
    uint64_t n = 0;
    for (const auto& d : day_counts) n += d.count;
    return n;
  }
  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(day_counts.size());
    for (const auto& d : day_counts) v.push_back(static_cast<double>(d.count));
    return v;
  }
};

// Zero-filled per-day counts of the matched documents. Duplicate ids in
// `matched_ids` count once.
inline FrequencySeries daily_counts(const Corpus& corpus, const PeriodSlice& slice,
                                    const std::vector<std::string>& matched_ids,
                                    std::string activity) {
  std::unordered_set<std::string_view> in_slice(slice.doc_ids.begin(), slice.doc_ids.end());
  std::unordered_set<std::string_view> matched;
  for (const auto& id : matched_ids) {
    if (!in_slice.count(id)) {
      throw ArgumentError("matched id '" + id + "' is not in slice '" + slice.label + "'");
    }
    matched.insert(id);
  }
  FrequencySeries series{std::move(activity), slice.label, {}};
  for (Date d = slice.start; d <= slice.end; d += std::chrono::days{1}) {
    series.day_counts.push_back({d, 0});
  }
  for (const auto& id : matched) {
    const Date d = date_of(corpus.at(id).created_at);
    ++series.day_counts[static_cast<size_t>((d - slice.start).count())].count;
  }
  return series;
}

inline std::string series_csv(const FrequencySeries& s) {
  std::string out = "activity,period,date,count\n";
  for (const auto& d : s.day_counts) {
    out += s.activity + "," + s.period_label + "," + format_date(d.date) + "," +
           std::to_string(d.count) + "\n";
  }
  return out;
}

inline FrequencySeries read_series_csv(const fs::path& path) {
  FrequencySeries s;
  bool header = true;
  size_t line_no = 0;
  for_each_line(path, [&](std::string_view line) {
    ++line_no;
    if (header) {
      if (line != "activity,period,date,count") {
        throw FormatError(path.string() + ": unexpected header");
      }
      header = false;
      return;
    }
    if (line.empty()) return;
    std::vector<std::string_view> f;
    size_t pos = 0;
    while (true) {
      size_t comma = line.find(',', pos);
      f.push_back(line.substr(pos, comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    auto date = f.size() == 4 ? parse_date(f[2]) : std::nullopt;
    uint64_t count = 0;
    if (!date || std::from_chars(f[3].data(), f[3].data() + f[3].size(), count).ec !=
                     std::errc()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad row");
    }
    if (s.day_counts.empty()) {
      s.activity = std::string(f[0]);
      s.period_label = std::string(f[1]);
    } else if (*date != s.day_counts.back().date + std::chrono::days{1}) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": dates are not contiguous");
    }
    s.day_counts.push_back({*date, count});
  });
  if (header) throw FormatError(path.string() + ": empty file");
  return s;
}

}  // namespace shiftlens

#endif  // SHIFTLENS_CORPUS_HPP_
