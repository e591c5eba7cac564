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

// End-to-end runs driven by a JSON config.
//
// Stages run in a fixed order and talk to each other only through files
// under the output directory, so a run can restart at any stage and reuse
// the artifacts upstream of it. Every file a run writes is listed in
// manifest.json with its SHA-256.

#ifndef SHIFTLENS_PIPELINE_HPP_
#define SHIFTLENS_PIPELINE_HPP_

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "shiftlens/corpus.hpp"
#include "shiftlens/date.hpp"
#include "shiftlens/embedding.hpp"
#include "shiftlens/error.hpp"
#include "shiftlens/io.hpp"
#include "shiftlens/lm.hpp"
#include "shiftlens/report.hpp"
#include "shiftlens/retrieval.hpp"
#include "shiftlens/shift.hpp"
#include "shiftlens/survey.hpp"
#include "shiftlens/synthetic.hpp"

#ifndef SHIFTLENS_VERSION
#define SHIFTLENS_VERSION "unknown"
#endif

namespace shiftlens {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitStageFailure = 3;

inline const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> s = {"ingest", "embed", "retrieve", "daily_counts",
                                             "lm",     "shift", "survey"};
  return s;
}

// Lowercase ASCII letters and digits, everything else folded to '-'.
inline std::string slug(std::string_view name) {
  std::string out;
  for (char c : name) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      out += static_cast<char>(std::tolower(u));
    } else if (out.empty() || out.back() != '-') {
      out += '-';
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

// ---------------------------------------------------------------------------
// Config

// A document collection read from JSONL or generated from a synthetic spec.
struct CorpusInput {
  std::optional<fs::path> path;
  std::optional<fs::path> synthetic;
  Source source = Source::kOther;
  std::string given;  // path as written in the config
};

struct PeriodDef {
  std::string label;
  Date start;
  Date end;
};

struct PeriodPair {
  PeriodDef pre;
  PeriodDef during;
};

struct ActivityConfig {
  std::string name;
  std::optional<CorpusInput> seed_corpus;  // absent: perplexity analysis only
  std::optional<fs::path> seed_vectors;
  std::optional<double> threshold;
  size_t k_anchors = kDefaultAnchors;
  ExpandMode expand = ExpandMode::kCentroid;

  ActivityQuerySpec query() const { return {name, k_anchors, threshold, expand}; }
};

struct PipelineConfig {
  nlohmann::json raw;
  std::string config_hash;
  fs::path base_dir;
  fs::path output_dir;
  uint64_t seed = 13;
  CorpusInput corpus;
  size_t embedding_dim = 256;
  uint64_t embedding_seed = 13;
  std::optional<fs::path> corpus_vectors;
  std::vector<ActivityConfig> activities;
  std::vector<PeriodPair> period_pairs;
  LmOptions lm;
  std::optional<fs::path> probes;
  std::optional<fs::path> logprobs;
  PerplexityShiftOptions perplexity;
  FrequencyShiftOptions frequency;
  double alpha0 = kDefaultAlpha0;
  uint64_t lexical_min_count = kDefaultLexicalMinCount;
  size_t top_n = 100;
  std::optional<fs::path> survey_tables;
  std::optional<fs::path> survey_respondents;
  SurveyDenominator denominator = SurveyDenominator::kAllRespondents;

  std::vector<PeriodDef> periods() const {
    std::vector<PeriodDef> out;
    std::set<std::string> seen;
    for (const auto& p : period_pairs) {
      for (const auto* d : {&p.pre, &p.during}) {
        if (seen.insert(d->label).second) out.push_back(*d);
      }
    }
    return out;
  }
};

namespace detail {

inline fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path q(p);
  return q.is_absolute() ? q : base / q;
}

inline CorpusInput corpus_input(const nlohmann::json& j, const fs::path& base, Source fallback) {
  CorpusInput c;
  c.source = fallback;
  if (j.contains("source")) c.source = parse_source(j.at("source").get<std::string>());
  const bool has_path = j.contains("path"), has_synth = j.contains("synthetic");
  if (has_path == has_synth) throw ValidationError("corpus needs exactly one of 'path' or 'synthetic'");
  c.given = j.at(has_path ? "path" : "synthetic").get<std::string>();
  (has_path ? c.path : c.synthetic) = resolve(base, c.given);
  return c;
}

inline PeriodDef period_def(const nlohmann::json& j) {
  PeriodDef p;
  p.label = j.at("label").get<std::string>();
  p.start = require_date(j.at("start").get<std::string>());
  p.end = require_date(j.at("end").get<std::string>());
  if (p.label.empty() || p.label.find_first_of(",/\\\n") != std::string::npos) {
    throw ValidationError("bad period label '" + p.label + "'");
  }
  if (p.start > p.end) throw ValidationError("period '" + p.label + "' ends before it starts");
  return p;
}

}  // namespace detail

// The hash covers everything except the output directory, so the same
// analysis written to two places carries the same hash.
inline std::string config_hash(const nlohmann::json& raw) {
  nlohmann::json h = raw;
  if (h.is_object()) h.erase("output_dir");
  return sha256_hex(h.dump());
}

inline PipelineConfig parse_pipeline_config(const nlohmann::json& j, const fs::path& base_dir) {
  PipelineConfig c;
  c.raw = j;
  c.base_dir = base_dir;
  try {
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    c.config_hash = config_hash(j);
    c.seed = j.value("seed", c.seed);
    c.output_dir = detail::resolve(base_dir, j.at("output_dir").get<std::string>());
    c.corpus = detail::corpus_input(j.at("corpus"), base_dir, Source::kOther);

    const auto emb = j.value("embedding", nlohmann::json::object());
    c.embedding_dim = emb.value("dim", c.embedding_dim);
    c.embedding_seed = emb.value("seed", c.seed);
    if (emb.contains("vectors")) {
      c.corpus_vectors = detail::resolve(base_dir, emb.at("vectors").get<std::string>());
    }

    std::set<std::string> names, slugs;
    for (const auto& a : j.at("activities")) {
      ActivityConfig ac;
      ac.name = a.at("name").get<std::string>();
      if (ac.name.empty() || slug(ac.name).empty() ||
          ac.name.find_first_of(",\n\t\"") != std::string::npos) {
        throw ValidationError("bad activity name '" + ac.name + "'");
      }
      if (!names.insert(ac.name).second || !slugs.insert(slug(ac.name)).second) {
        throw ValidationError("duplicate activity '" + ac.name + "'");
      }
      if (a.contains("seed_corpus")) {
        ac.seed_corpus = detail::corpus_input(a.at("seed_corpus"), base_dir, Source::kRedditArchive);
      }
      if (a.contains("seed_vectors")) {
        ac.seed_vectors = detail::resolve(base_dir, a.at("seed_vectors").get<std::string>());
      }
      if (a.contains("threshold")) ac.threshold = a.at("threshold").get<double>();
      ac.k_anchors = a.value("k_anchors", ac.k_anchors);
      if (a.contains("expand")) ac.expand = parse_expand_mode(a.at("expand").get<std::string>());
      c.activities.push_back(std::move(ac));
    }

    for (const auto& p : j.at("periods")) {
      c.period_pairs.push_back({detail::period_def(p.at("pre")), detail::period_def(p.at("during"))});
    }

    const auto lm = j.value("lm", nlohmann::json::object());
    c.lm.order = lm.value("order", c.lm.order);
    c.lm.k = lm.value("k", c.lm.k);
    c.lm.min_count = lm.value("min_count", c.lm.min_count);
    c.lm.lambdas = lm.value("lambdas", std::vector<double>{});
    if (j.contains("probes")) c.probes = detail::resolve(base_dir, j.at("probes").get<std::string>());
    if (j.contains("logprobs")) {
      c.logprobs = detail::resolve(base_dir, j.at("logprobs").get<std::string>());
    }
    c.perplexity.unpaired = j.value("perplexity", nlohmann::json::object()).value("unpaired", false);
    const auto freq = j.value("frequency", nlohmann::json::object());
    c.frequency.weekday_align = freq.value("weekday_align", false);
    c.frequency.paired_d = freq.value("paired_d", false);
    const auto lex = j.value("lexical", nlohmann::json::object());
    c.alpha0 = lex.value("alpha0", c.alpha0);
    c.lexical_min_count = lex.value("min_count", c.lexical_min_count);
    c.top_n = lex.value("top_n", c.top_n);

    if (j.contains("survey")) {
      const auto& s = j.at("survey");
      if (s.contains("tables")) {
        c.survey_tables = detail::resolve(base_dir, s.at("tables").get<std::string>());
      }
      if (s.contains("respondents")) {
        c.survey_respondents = detail::resolve(base_dir, s.at("respondents").get<std::string>());
      }
      const std::string d = s.value("denominator", "all_respondents");
      if (d == "regular_doers") {
        c.denominator = SurveyDenominator::kRegularDoers;
      } else if (d != "all_respondents") {
        throw ValidationError("unknown survey denominator '" + d + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

// Checks everything that can be checked before a stage runs: referenced
// files exist, pairs are equal length, thresholds and probes resolve.
inline void validate_pipeline_config(const PipelineConfig& c) {
  auto must_exist = [](const std::optional<fs::path>& p, const std::string& what) {
    if (p && !fs::exists(*p)) throw ValidationError(what + " not found: " + p->string());
  };
  must_exist(c.corpus.path, "corpus");
  must_exist(c.corpus.synthetic, "synthetic corpus spec");
  must_exist(c.corpus_vectors, "corpus vectors");
  must_exist(c.probes, "probe phrases");
  must_exist(c.logprobs, "log-prob file");
  must_exist(c.survey_tables, "survey tables");
  must_exist(c.survey_respondents, "survey respondents");
  if (c.embedding_dim < 8) throw ValidationError("embedding dim must be >= 8");
  if (c.activities.empty()) throw ValidationError("no activities configured");
  if (c.period_pairs.empty()) throw ValidationError("no period pairs configured");

  std::map<std::string, std::pair<Date, Date>> labels;
  for (const auto& p : c.period_pairs) {
    if (days_inclusive(p.pre.start, p.pre.end) != days_inclusive(p.during.start, p.during.end)) {
      throw ValidationError("period pair " + p.pre.label + "/" + p.during.label +
                            " covers different numbers of days");
    }
    for (const auto* d : {&p.pre, &p.during}) {
      auto [it, fresh] = labels.emplace(d->label, std::make_pair(d->start, d->end));
      if (!fresh && it->second != std::make_pair(d->start, d->end)) {
        throw ValidationError("period label '" + d->label + "' has two different ranges");
      }
    }
  }

  std::map<std::string, ProbeDefinition> probes;
  if (c.probes) {
    try {
      for (auto& d : probe_definitions_from_json(nlohmann::json::parse(read_file(*c.probes)))) {
        probes.emplace(d.activity, d);
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(c.probes->string() + ": " + e.what());
    } catch (const FormatError& e) {
      throw ValidationError(e.what());
    }
  }
  for (const auto& a : c.activities) {
    if (a.seed_corpus) {
      must_exist(a.seed_corpus->path, "seed corpus for " + a.name);
      must_exist(a.seed_corpus->synthetic, "synthetic seed spec for " + a.name);
      must_exist(a.seed_vectors, "seed vectors for " + a.name);
      if (!a.threshold && !default_threshold(a.name)) {
        throw ValidationError("activity '" + a.name + "' has no default threshold; set one");
      }
      if (a.threshold) {
        try {
          check_threshold(*a.threshold);
        } catch (const ArgumentError& e) {
          throw ValidationError(a.name + ": " + e.what());
        }
      }
      if (a.k_anchors == 0) throw ValidationError(a.name + ": k_anchors must be >= 1");
      if (c.corpus_vectors.has_value() != a.seed_vectors.has_value()) {
        throw ValidationError(a.name + ": external vectors must be given for corpus and seeds alike");
      }
    }
    auto it = probes.find(a.name);
    if (it == probes.end()) {
      if (!a.seed_corpus) {
        throw ValidationError("activity '" + a.name + "' has neither a seed corpus nor probe phrases");
      }
      continue;
    }
    try {
      for (auto m : {Modality::kOffline, Modality::kOnline}) {
        if (it->second.build(m).phrases.size() < 2) {
          throw ValidationError("activity '" + a.name + "' needs at least two " +
                                std::string(modality_name(m)) + " probe phrases");
        }
      }
    } catch (const ArgumentError& e) {
      throw ValidationError(a.name + " probes: " + e.what());
    }
  }
  try {
    NgramLanguageModel::train(std::vector<TokenSequence>{{"a", "a"}}, c.lm);
  } catch (const ArgumentError& e) {
    throw ValidationError(std::string("lm settings: ") + e.what());
  }
  if (!(c.alpha0 > 0)) throw ValidationError("lexical alpha0 must be positive");
  if (c.top_n < 1) throw ValidationError("lexical top_n must be >= 1");
}

inline PipelineConfig load_pipeline_config(const fs::path& path) {
  if (!fs::exists(path)) throw ValidationError("config not found: " + path.string());
  nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ValidationError(path.string() + ": invalid JSON");
  return parse_pipeline_config(j, fs::absolute(path).parent_path());
}

// ---------------------------------------------------------------------------
// Run

struct RunOptions {
  std::optional<std::string> from_stage;  // reuse artifacts of earlier stages
  bool record_timings = true;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string failed_stage;
  std::string message;
  nlohmann::json manifest;
};

namespace detail {

// One run per output directory.
class RunLock {
 public:
  explicit RunLock(const fs::path& dir) : path_(dir / ".lock") {
    FILE* f = std::fopen(path_.c_str(), "wx");
    if (f == nullptr) {
      throw ValidationError("output directory is locked by another run (" + path_.string() +
                            "); remove the file if no run is active");
    }
    std::fclose(f);
  }
  ~RunLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  fs::path path_;
};

class StageContext {
 public:
  StageContext(const PipelineConfig& cfg, fs::path root) : cfg_(cfg), root_(std::move(root)) {}

  const PipelineConfig& config() const { return cfg_; }
  fs::path path(const std::string& rel) const { return root_ / rel; }

  void write(const std::string& rel, std::string_view bytes) {
    const fs::path p = root_ / rel;
    fs::create_directories(p.parent_path());
    write_file_atomic(p, bytes);
    outputs_[rel] = {sha256_hex(bytes), bytes.size()};
  }

  void write_json(const std::string& rel, nlohmann::json j) {
    if (j.is_object()) j["config_hash"] = cfg_.config_hash;
    write(rel, j.dump(2) + "\n");
  }

  nlohmann::json outputs_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& [rel, h] : outputs_) {
      arr.push_back({{"path", rel}, {"sha256", h.first}, {"bytes", h.second}});
    }
    return arr;
  }

 private:
  const PipelineConfig& cfg_;
  fs::path root_;
  std::map<std::string, std::pair<std::string, size_t>> outputs_;
};

inline uint64_t derived_seed(uint64_t seed, std::string_view name) {
  return splitmix64(seed ^ stable_hash(name, 0x5eed));
}

inline IngestResult ingest_input(const CorpusInput& in, uint64_t seed,
                                 std::optional<std::string>* labels_tsv) {
  if (in.synthetic) {
    auto j = nlohmann::json::parse(read_file(*in.synthetic));
    auto s = generate_synthetic_corpus(synth_spec_from_json(j), seed);
    if (labels_tsv) *labels_tsv = synthetic_labels_tsv(s);
    std::istringstream records(synthetic_records(s));
    return ingest_documents(records, in.source);
  }
  return ingest_documents(*in.path, in.source);
}

inline void write_corpus(StageContext& ctx, const std::string& dir, const IngestResult& r) {
  std::string body;
  for (const auto& d : r.corpus.documents()) body += document_record(d).dump() + "\n";
  ctx.write(dir + "/documents.jsonl", body);
  ctx.write(dir + "/manifest.json", ingest_manifest(r.corpus, r.report).dump(2) + "\n");
}

inline std::string seed_dir(const ActivityConfig& a) { return "seeds/" + slug(a.name); }

inline void stage_ingest(StageContext& ctx) {
  const auto& cfg = ctx.config();
  std::optional<std::string> labels;
  auto target = ingest_input(cfg.corpus, cfg.seed, &labels);
  if (target.corpus.empty()) throw ValidationError("corpus has no valid documents");
  write_corpus(ctx, "corpus", target);
  if (labels) ctx.write("corpus/labels.tsv", *labels);
  for (const auto& a : cfg.activities) {
    if (!a.seed_corpus) continue;
    auto seeds = ingest_input(*a.seed_corpus, derived_seed(cfg.seed, a.name), nullptr);
    if (seeds.corpus.empty()) throw ValidationError("seed corpus for " + a.name + " is empty");
    write_corpus(ctx, seed_dir(a), seeds);
  }
}

inline EmbeddingIndex embed_corpus(const Corpus& corpus, size_t dim, uint64_t seed) {
  std::vector<std::pair<std::string, Vector>> entries;
  entries.reserve(corpus.size());
  for (const auto& d : corpus.documents()) {
    entries.emplace_back(d.id, embed_reference(d.text_norm, dim, seed));
  }
  return EmbeddingIndex(dim, std::move(entries));
}

// External vectors must cover every document; extra ids are ignored.
inline EmbeddingIndex external_vectors(const fs::path& file, const Corpus& corpus) {
  auto all = read_vectors(file);
  std::vector<std::pair<std::string, Vector>> entries;
  for (const auto& d : corpus.documents()) {
    auto i = all.find(d.id);
    if (!i) throw ValidationError(file.string() + " has no vector for document '" + d.id + "'");
    auto v = all.vector(*i);
    entries.emplace_back(d.id, Vector(v.begin(), v.end()));
  }
  return EmbeddingIndex(all.dim(), std::move(entries));
}

inline void stage_embed(StageContext& ctx) {
  const auto& cfg = ctx.config();
  auto vectors_for_corpus = [&](const Corpus& c, const std::optional<fs::path>& external) {
    return external ? external_vectors(*external, c)
                    : embed_corpus(c, cfg.embedding_dim, cfg.embedding_seed);
  };
  const auto corpus = read_corpus_dir(ctx.path("corpus"));
  const auto index = vectors_for_corpus(corpus, cfg.corpus_vectors);
  ctx.write("vectors/corpus.slvx", encode_vectors(index));
  for (const auto& a : cfg.activities) {
    if (!a.seed_corpus) continue;
    const auto seeds = vectors_for_corpus(read_corpus_dir(ctx.path(seed_dir(a))), a.seed_vectors);
    if (seeds.dim() != index.dim()) {
      throw ValidationError("seed vectors for " + a.name + " have a different dimension");
    }
    ctx.write("vectors/seed-" + slug(a.name) + ".slvx", encode_vectors(seeds));
  }
}

inline std::vector<double> sweep_grid() {
  std::vector<double> g;
  for (int i = -20; i <= 100; ++i) g.push_back(i / 100.0);
  return g;
}

inline void stage_retrieve(StageContext& ctx) {
  const auto& cfg = ctx.config();
  const auto corpus = read_corpus_dir(ctx.path("corpus"));
  const auto index = read_vectors(ctx.path("vectors/corpus.slvx"));
  std::optional<std::map<std::string, std::string>> labels;
  if (fs::exists(ctx.path("corpus/labels.tsv"))) labels = read_labels_tsv(ctx.path("corpus/labels.tsv"));
  for (const auto& a : cfg.activities) {
    if (!a.seed_corpus) continue;
    const auto seed_index = read_vectors(ctx.path("vectors/seed-" + slug(a.name) + ".slvx"));
    std::vector<Vector> seeds;
    for (size_t i = 0; i < seed_index.size(); ++i) {
      auto v = seed_index.vector(i);
      seeds.emplace_back(v.begin(), v.end());
    }
    const auto r = retrieve(a.query(), seeds, index);
    const std::string base = "retrieval/" + slug(a.name);
    ctx.write_json(base + ".json", retrieval_result_json(r));
    ctx.write(base + "-anchors.tsv", anchor_review_tsv(r, corpus));

    // Threshold sweep; precision and recall when sidecar labels exist.
    const auto anchors = vectors_for(index, r.anchors);
    auto scores = expansion_scores(anchors, index, a.expand);
    std::string csv = labels ? "threshold,matches,precision,recall\n" : "threshold,matches\n";
    size_t relevant = 0;
    if (labels) {
      for (size_t i = 0; i < index.size(); ++i) {
        auto it = labels->find(index.id(i));
        relevant += it != labels->end() && it->second == a.name;
      }
    }
    for (double t : sweep_grid()) {
      size_t matches = 0, hits = 0;
      for (size_t i = 0; i < index.size(); ++i) {
        if (!clears_threshold(scores[i], t)) continue;
        ++matches;
        if (labels) {
          auto it = labels->find(index.id(i));
          hits += it != labels->end() && it->second == a.name;
        }
      }
      csv += format_double(t) + "," + std::to_string(matches);
      if (labels) {
        csv += "," + format_double(matches ? double(hits) / double(matches) : 1.0) + "," +
               format_double(relevant ? double(hits) / double(relevant) : 1.0);
      }
      csv += "\n";
    }
    ctx.write(base + "-sweep.csv", csv);
  }
}

inline std::string counts_file(const ActivityConfig& a, const std::string& label) {
  return "counts/" + slug(a.name) + "-" + label + ".csv";
}

inline void stage_daily_counts(StageContext& ctx) {
  const auto& cfg = ctx.config();
  const auto corpus = read_corpus_dir(ctx.path("corpus"));
  for (const auto& a : cfg.activities) {
    if (!a.seed_corpus) continue;
    const auto r = retrieval_result_from_json(
        nlohmann::json::parse(read_file(ctx.path("retrieval/" + slug(a.name) + ".json"))));
    const auto matched = r.matched_ids();
    for (const auto& p : cfg.periods()) {
      const auto slice = slice_by_period(corpus, p.start, p.end, p.label);
      ctx.write(counts_file(a, p.label),
                series_csv(daily_counts(corpus, slice, restrict_to_slice(slice, matched), a.name)));
    }
    for (const auto& pair : cfg.period_pairs) {
      ctx.write("counts/" + slug(a.name) + "-" + pair.pre.label + "-" + pair.during.label +
                    "-plot.csv",
                emit_plot_data(read_series_csv(ctx.path(counts_file(a, pair.pre.label))),
                               read_series_csv(ctx.path(counts_file(a, pair.during.label)))));
    }
  }
}

inline std::vector<ProbePhraseSet> probe_sets(const PipelineConfig& cfg) {
  std::vector<ProbePhraseSet> out;
  if (!cfg.probes) return out;
  auto defs = probe_definitions_from_json(nlohmann::json::parse(read_file(*cfg.probes)));
  for (const auto& a : cfg.activities) {
    for (const auto& d : defs) {
      if (d.activity != a.name) continue;
      out.push_back(d.build(Modality::kOffline));
      out.push_back(d.build(Modality::kOnline));
      break;
    }
  }
  return out;
}

inline void stage_lm(StageContext& ctx) {
  const auto& cfg = ctx.config();
  const auto corpus = read_corpus_dir(ctx.path("corpus"));
  const auto probes = probe_sets(cfg);
  for (const auto& p : cfg.periods()) {
    const auto slice = slice_by_period(corpus, p.start, p.end, p.label);
    if (slice.doc_ids.empty()) throw ValidationError("period " + p.label + " has no documents");
    const auto lm = NgramLanguageModel::train(slice_tokens(corpus, slice), cfg.lm, p.label);
    ctx.write("lm/" + p.label + "/counts.bin", lm.counts_bytes());
    ctx.write("lm/" + p.label + "/meta.json", lm.metadata().dump(2) + "\n");
    std::string scores;
    nlohmann::json summary = nlohmann::json::object();
    for (const auto& set : probes) {
      const auto scored = score_for_export(lm, set);
      scores += export_token_logprobs(scored);
      std::vector<PerplexityReport> reports;
      for (const auto& s : scored) reports.push_back(s.report);
      summary[set.activity][std::string(modality_name(set.modality))] =
          perplexity_summary_json(summarize(std::move(reports)));
    }
    ctx.write("lm/" + p.label + "-scores.jsonl", scores);
    ctx.write_json("lm/" + p.label + "-perplexity.json",
                   {{"period", p.label}, {"activities", summary}});
  }
}

inline void stage_shift(StageContext& ctx) {
  const auto& cfg = ctx.config();
  const auto probes = probe_sets(cfg);
  const std::optional<std::vector<ImportedScore>> external =
      cfg.logprobs ? std::optional(import_token_logprobs(*cfg.logprobs)) : std::nullopt;

  auto perplexity = nlohmann::json::array();
  for (const auto& pair : cfg.period_pairs) {
    auto scores = import_token_logprobs(ctx.path("lm/" + pair.pre.label + "-scores.jsonl"));
    auto during = import_token_logprobs(ctx.path("lm/" + pair.during.label + "-scores.jsonl"));
    scores.insert(scores.end(), during.begin(), during.end());
    for (const auto& set : probes) {
      auto run = [&](const std::vector<ImportedScore>& from, const char* source) {
        auto [a, b] = imported_pair(from, pair.pre.label, pair.during.label, set.activity, set.modality);
        auto r = perplexity_shift(a, b, cfg.perplexity);
        r.activity = set.activity;
        r.modality = set.modality;
        r.months = {pair.pre.label, pair.during.label};
        r.variant_flags["source"] = source;
        r.variant_flags["phrases"] = set.phrases.size();
        perplexity.push_back(shift_result_json(r));
      };
      run(scores, "ngram");
      if (external) run(*external, "imported");
    }
  }
  ctx.write_json("shift/perplexity.json", {{"results", perplexity}});

  auto frequency = nlohmann::json::array();
  auto lexical = nlohmann::json::array();
  const bool any_retrieval = std::any_of(cfg.activities.begin(), cfg.activities.end(),
                                         [](const auto& a) { return a.seed_corpus.has_value(); });
  if (any_retrieval) {
    const auto corpus = read_corpus_dir(ctx.path("corpus"));
    for (const auto& a : cfg.activities) {
      if (!a.seed_corpus) continue;
      const auto matched = retrieval_result_from_json(nlohmann::json::parse(
                               read_file(ctx.path("retrieval/" + slug(a.name) + ".json"))))
                               .matched_ids();
      for (const auto& pair : cfg.period_pairs) {
        const auto f = frequency_shift(read_series_csv(ctx.path(counts_file(a, pair.pre.label))),
                                       read_series_csv(ctx.path(counts_file(a, pair.during.label))),
                                       cfg.frequency);
        frequency.push_back(frequency_shift_json(f));

        auto tokens_of = [&](const PeriodDef& p) {
          auto slice = slice_by_period(corpus, p.start, p.end, p.label);
          slice.doc_ids = restrict_to_slice(slice, matched);
          return count_tokens(slice_tokens(corpus, slice));
        };
        const auto ci = tokens_of(pair.pre), cj = tokens_of(pair.during);
        const std::string stem =
            "shift/lexical-" + slug(a.name) + "-" + pair.pre.label + "-" + pair.during.label;
        nlohmann::json entry = {{"activity", a.name},
                                {"corpus_i", pair.pre.label},
                                {"corpus_j", pair.during.label},
                                {"alpha0", cfg.alpha0},
                                {"min_count", cfg.lexical_min_count}};
        try {
          auto pre_side = log_odds_dirichlet(ci, cj, cfg.alpha0, cfg.lexical_min_count);
          auto during_side = log_odds_dirichlet(cj, ci, cfg.alpha0, cfg.lexical_min_count);
          ctx.write(stem + ".csv", lexical_csv(pre_side));
          ctx.write("shift/wordcloud-" + slug(a.name) + "-" + pair.pre.label + "-vs-" +
                        pair.during.label + ".csv",
                    emit_wordcloud_weights(pre_side, cfg.top_n));
          ctx.write("shift/wordcloud-" + slug(a.name) + "-" + pair.during.label + "-vs-" +
                        pair.pre.label + ".csv",
                    emit_wordcloud_weights(during_side, cfg.top_n));
          entry["status"] = "ok";
          entry["tokens"] = pre_side.entries.size();
        } catch (const ArgumentError& e) {
          entry["status"] = "skipped";
          entry["reason"] = e.what();
        }
        lexical.push_back(entry);
      }
    }
  }
  ctx.write_json("shift/frequency.json", {{"results", frequency}});
  ctx.write_json("shift/lexical.json", {{"results", lexical}});
}

inline bool stage_survey(StageContext& ctx) {
  const auto& cfg = ctx.config();
  if (!cfg.survey_tables && !cfg.survey_respondents) return false;
  if (cfg.survey_tables) {
    const auto loaded = load_survey(*cfg.survey_tables);
    auto tables = nlohmann::json::array();
    for (const auto& t : loaded.tables) {
      tables.push_back(net_change_json(net_engagement_change(t, cfg.denominator)));
    }
    ctx.write_json("survey/net_change.json",
                   {{"tables", tables}, {"load_report", survey_load_report_json(loaded.report)}});
  }
  if (cfg.survey_respondents) {
    ctx.write_json("survey/demographics.json",
                   demographics_json(summarize_demographics(*cfg.survey_respondents)));
  }
  return true;
}

inline std::optional<nlohmann::json> previous_stage(const nlohmann::json& manifest,
                                                    const std::string& name) {
  if (!manifest.contains("stages")) return std::nullopt;
  for (const auto& s : manifest.at("stages")) {
    if (s.value("name", "") == name) return s;
  }
  return std::nullopt;
}

}  // namespace detail

inline RunOutcome run_pipeline(const PipelineConfig& cfg, const RunOptions& opts = {}) {
  RunOutcome out;
  const auto& stages = pipeline_stages();
  size_t first = 0;
  try {
    validate_pipeline_config(cfg);
    if (opts.from_stage) {
      auto it = std::find(stages.begin(), stages.end(), *opts.from_stage);
      if (it == stages.end()) throw ValidationError("unknown stage '" + *opts.from_stage + "'");
      first = static_cast<size_t>(it - stages.begin());
    }
  } catch (const ValidationError& e) {
    out.exit_code = kExitValidation;
    out.message = e.what();
    return out;
  }

  const fs::path root = cfg.output_dir;
  fs::create_directories(root);
  std::optional<detail::RunLock> lock;
  try {
    lock.emplace(root);
  } catch (const ValidationError& e) {
    out.exit_code = kExitValidation;
    out.message = e.what();
    return out;
  }

  nlohmann::json previous = nlohmann::json::object();
  if (first > 0) {
    if (!fs::exists(root / "manifest.json")) {
      out.exit_code = kExitValidation;
      out.message = "cannot resume: no manifest.json in " + root.string();
      return out;
    }
    previous = nlohmann::json::parse(read_file(root / "manifest.json"), nullptr, false);
    if (!previous.is_object() || previous.value("config_hash", "") != cfg.config_hash) {
      out.exit_code = kExitValidation;
      out.message = "cannot resume: the previous run used a different config";
      return out;
    }
  }

  nlohmann::json manifest = {{"format", "shiftlens-run"},
                             {"version", SHIFTLENS_VERSION},
                             {"config_hash", cfg.config_hash},
                             {"seeds", {{"global", cfg.seed}, {"embedding", cfg.embedding_seed}}},
                             {"from_stage", opts.from_stage ? nlohmann::json(*opts.from_stage)
                                                            : nlohmann::json(nullptr)},
                             {"failed_stage", nullptr}};
  auto inputs = nlohmann::json::array();
  auto add_input = [&](const std::string& role, const std::optional<fs::path>& p) {
    if (p) inputs.push_back({{"role", role}, {"sha256", sha256_file(*p)}});
  };
  add_input("corpus", cfg.corpus.path);
  add_input("corpus_spec", cfg.corpus.synthetic);
  add_input("corpus_vectors", cfg.corpus_vectors);
  for (const auto& a : cfg.activities) {
    if (!a.seed_corpus) continue;
    add_input("seed_corpus:" + a.name, a.seed_corpus->path);
    add_input("seed_spec:" + a.name, a.seed_corpus->synthetic);
    add_input("seed_vectors:" + a.name, a.seed_vectors);
  }
  add_input("probes", cfg.probes);
  add_input("logprobs", cfg.logprobs);
  add_input("survey_tables", cfg.survey_tables);
  add_input("survey_respondents", cfg.survey_respondents);
  manifest["inputs"] = inputs;

  auto stage_records = nlohmann::json::array();
  nlohmann::json timings = nlohmann::json::object();
  bool failed = false;
  for (size_t i = 0; i < stages.size(); ++i) {
    const std::string& name = stages[i];
    nlohmann::json record = {{"name", name}};
    if (failed) {
      record["status"] = "not_run";
      record["outputs"] = nlohmann::json::array();
      stage_records.push_back(record);
      continue;
    }
    if (i < first) {
      // Reused: the previous run's files must still be there, unchanged.
      auto prev = detail::previous_stage(previous, name);
      std::string problem;
      if (!prev || prev->value("status", "") == "failed" || prev->value("status", "") == "not_run") {
        problem = "stage '" + name + "' has no completed outputs to reuse";
      } else {
        for (const auto& o : prev->at("outputs")) {
          const fs::path p = root / o.at("path").get<std::string>();
          if (!fs::exists(p) || sha256_file(p) != o.at("sha256").get<std::string>()) {
            problem = "reused artifact changed or missing: " + o.at("path").get<std::string>();
            break;
          }
        }
      }
      if (!problem.empty()) {
        out.exit_code = kExitValidation;
        out.message = problem;
        return out;
      }
      record["status"] = "reused";
      record["outputs"] = prev->at("outputs");
      stage_records.push_back(record);
      continue;
    }

    detail::StageContext ctx(cfg, root);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      bool ran = true;
      if (name == "ingest") detail::stage_ingest(ctx);
      if (name == "embed") detail::stage_embed(ctx);
      if (name == "retrieve") detail::stage_retrieve(ctx);
      if (name == "daily_counts") detail::stage_daily_counts(ctx);
      if (name == "lm") detail::stage_lm(ctx);
      if (name == "shift") detail::stage_shift(ctx);
      if (name == "survey") ran = detail::stage_survey(ctx);
      record["status"] = ran ? "ok" : "skipped";
    } catch (const std::exception& e) {
      failed = true;
      record["status"] = "failed";
      record["error"] = e.what();
      out.exit_code = kExitStageFailure;
      out.failed_stage = name;
      out.message = "stage '" + name + "' failed: " + e.what();
      manifest["failed_stage"] = name;
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    if (opts.record_timings) timings[name] = dt.count();
    record["outputs"] = ctx.outputs_json();
    stage_records.push_back(record);
  }
  manifest["stages"] = stage_records;
  manifest["timings"] = timings;
  write_file_atomic(root / "manifest.json", manifest.dump(2) + "\n");
  out.manifest = std::move(manifest);
  return out;
}

inline RunOutcome run_pipeline(const fs::path& config_path, const RunOptions& opts = {},
                               std::optional<fs::path> output_override = std::nullopt) {
  try {
    auto cfg = load_pipeline_config(config_path);
    if (output_override) cfg.output_dir = *output_override;
    return run_pipeline(cfg, opts);
  } catch (const ValidationError& e) {
    RunOutcome out;
    out.exit_code = kExitValidation;
    out.message = e.what();
    return out;
  }
}

}  // namespace shiftlens

#endif  // SHIFTLENS_PIPELINE_HPP_
