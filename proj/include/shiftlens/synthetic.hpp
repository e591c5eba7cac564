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

// Seeded generator of labelled corpora with planted topic-rate and phrase
// signals. Output depends only on (spec, seed): the generator draws raw
// 64-bit words from std::mt19937_64 and maps them to ranges itself instead of
// using the implementation-defined standard distributions.

#ifndef SHIFTLENS_SYNTHETIC_HPP_
#define SHIFTLENS_SYNTHETIC_HPP_

#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "shiftlens/corpus.hpp"

namespace shiftlens {

struct PhraseInsertion {
  std::string period;  // period label the insertion applies to
  std::string phrase;
  double probability = 0.0;  // per document of the topic
};

struct SynthTopic {
  std::string name;
  std::vector<std::string> vocabulary;
  double weight = 1.0;
  std::map<std::string, double> multipliers;  // period label -> rate factor
  std::vector<PhraseInsertion> insertions;

  double rate_in(const std::string& period) const {
    auto it = multipliers.find(period);
    return weight * (it == multipliers.end() ? 1.0 : it->second);
  }
};

struct SynthPeriod {
  std::string label;
  Date start;
  Date end;
  size_t documents = 0;
};

struct SynthSpec {
  std::vector<SynthTopic> topics;
  std::vector<SynthPeriod> periods;
  size_t min_tokens = 6;
  size_t max_tokens = 14;
  std::string id_prefix = "syn";
  Source source = Source::kSynthetic;
};

struct SyntheticCorpus {
  Corpus corpus;
  std::map<std::string, std::string> labels;  // doc id -> topic name
};

namespace detail {

class SynthRng {
 public:
  explicit SynthRng(uint64_t seed) : gen_(seed) {}
  uint64_t below(uint64_t n) { return gen_() % n; }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace detail

inline void validate(const SynthSpec& spec) {
  if (spec.topics.empty()) throw ArgumentError("synthetic spec has no topics");
  if (spec.periods.empty()) throw ArgumentError("synthetic spec has no periods");
  if (spec.min_tokens == 0 || spec.min_tokens > spec.max_tokens) {
    throw ArgumentError("synthetic spec needs 1 <= min_tokens <= max_tokens");
  }
  for (const auto& t : spec.topics) {
    if (t.vocabulary.empty()) {
      throw ArgumentError("topic '" + t.name + "' has an empty vocabulary");
    }
    if (!(t.weight >= 0.0)) throw ArgumentError("topic '" + t.name + "' has a negative weight");
    for (const auto& [label, m] : t.multipliers) {
      if (!(m >= 0.0)) throw ArgumentError("topic '" + t.name + "' has a negative multiplier");
    }
    for (const auto& ins : t.insertions) {
      if (!(ins.probability >= 0.0 && ins.probability <= 1.0)) {
        throw ArgumentError("insertion probability outside [0, 1]");
      }
    }
  }
  for (const auto& p : spec.periods) {
    if (p.start > p.end) throw ArgumentError("period '" + p.label + "' ends before it starts");
    double total = 0;
    for (const auto& t : spec.topics) total += t.rate_in(p.label);
    if (p.documents > 0 && !(total > 0.0)) {
      throw ArgumentError("period '" + p.label + "' has zero total topic rate");
    }
  }
}

inline SyntheticCorpus generate_synthetic_corpus(const SynthSpec& spec, uint64_t seed) {
  validate(spec);
  detail::SynthRng rng(seed);
  std::vector<Document> docs;
  std::map<std::string, std::string> labels;
  size_t serial = 0;
  for (const auto& period : spec.periods) {
    std::vector<double> cumulative;
    double total = 0;
    for (const auto& t : spec.topics) {
      total += t.rate_in(period.label);
      cumulative.push_back(total);
    }
    const auto days = static_cast<uint64_t>(days_inclusive(period.start, period.end));
    for (size_t j = 0; j < period.documents; ++j) {
      const double u = rng.unit() * total;
      size_t topic = 0;
      while (topic + 1 < cumulative.size() && u >= cumulative[topic]) ++topic;
      const SynthTopic& t = spec.topics[topic];

      Timestamp ts{period.start + std::chrono::days{static_cast<long>(rng.below(days))}};
      ts += std::chrono::seconds{static_cast<long>(rng.below(86400))};

      const size_t len =
          spec.min_tokens + rng.below(spec.max_tokens - spec.min_tokens + 1);
      std::vector<std::string> words;
      words.reserve(len);
      for (size_t k = 0; k < len; ++k) words.push_back(t.vocabulary[rng.below(t.vocabulary.size())]);
      for (const auto& ins : t.insertions) {
        if (ins.period != period.label) continue;
        if (rng.unit() < ins.probability) {
          const size_t at = rng.below(words.size() + 1);
          words.insert(words.begin() + static_cast<long>(at), ins.phrase);
        }
      }

      char id[64];
      std::snprintf(id, sizeof id, "%s-%07zu", spec.id_prefix.c_str(), serial++);
      labels[id] = t.name;
      docs.push_back(make_document(id, join_tokens(words), ts, spec.source));
    }
  }
  return SyntheticCorpus{Corpus(std::move(docs)), std::move(labels)};
}

inline SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  SynthSpec spec;
  spec.min_tokens = j.value("min_tokens", spec.min_tokens);
  spec.max_tokens = j.value("max_tokens", spec.max_tokens);
  spec.id_prefix = j.value("id_prefix", spec.id_prefix);
  if (j.contains("source")) spec.source = parse_source(j.at("source").get<std::string>());
  for (const auto& p : j.at("periods")) {
    spec.periods.push_back({p.at("label").get<std::string>(),
                            require_date(p.at("start").get<std::string>()),
                            require_date(p.at("end").get<std::string>()),
                            p.at("documents").get<size_t>()});
  }
  for (const auto& t : j.at("topics")) {
    SynthTopic topic;
    topic.name = t.at("name").get<std::string>();
    topic.vocabulary = t.at("vocabulary").get<std::vector<std::string>>();
    topic.weight = t.value("weight", 1.0);
    if (t.contains("multipliers")) {
      topic.multipliers = t.at("multipliers").get<std::map<std::string, double>>();
    }
    for (const auto& ins : t.value("insertions", nlohmann::json::array())) {
      topic.insertions.push_back({ins.at("period").get<std::string>(),
                                  ins.at("phrase").get<std::string>(),
                                  ins.at("probability").get<double>()});
    }
    spec.topics.push_back(std::move(topic));
  }
  return spec;
}

// JSONL records in corpus order, ready for ingest_documents().
inline std::string synthetic_records(const SyntheticCorpus& s) {
  std::string out;
  for (const auto& d : s.corpus.documents()) {
    out += document_record(d).dump();
    out.push_back('\n');
  }
  return out;
}

// Ground-truth sidecar: "id<TAB>topic" per line, sorted by id.
inline std::string synthetic_labels_tsv(const SyntheticCorpus& s) {
  std::string out;
  for (const auto& [id, topic] : s.labels) out += id + "\t" + topic + "\n";
  return out;
}

inline std::map<std::string, std::string> read_labels_tsv(const fs::path& path) {
  std::map<std::string, std::string> labels;
  for_each_line(path, [&](std::string_view line) {
    if (line.empty()) return;
    const size_t tab = line.find('\t');
    if (tab == std::string_view::npos) throw FormatError(path.string() + ": missing tab");
    labels.emplace(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
  });
  return labels;
}

}  // namespace shiftlens

#endif  // SHIFTLENS_SYNTHETIC_HPP_
