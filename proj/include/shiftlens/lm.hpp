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

// Per-period n-gram language models and phrase perplexity.
//
// The model interpolates add-k estimates of every order:
//
//   p(w | h) = sum_j lambda_j * (c(h_j w) + k) / (c(h_j) + k |V|)
//
// where h_j is the last j-1 tokens of the history, c(h_j) is the number of
// events observed after h_j, and V is the predictable vocabulary (every
// symbol except <s>). Sentences are left-padded with order-1 <s> symbols and
// terminated by </s>. Phrase scores cover the phrase tokens only: </s> is
// trained on but never scored, and perplexity normalizes by the visible
// token count.

#ifndef SHIFTLENS_LM_HPP_
#define SHIFTLENS_LM_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "shiftlens/binary.hpp"
#include "shiftlens/error.hpp"
#include "shiftlens/io.hpp"
#include "shiftlens/modality.hpp"
#include "shiftlens/text.hpp"

namespace shiftlens {

inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";
inline constexpr std::string_view kUnkToken = "<unk>";

// Interpolation weights, highest order first.
inline std::vector<double> default_lambdas(int order) {
  switch (order) {
    case 1: return {1.0};
    case 2: return {0.6, 0.4};
    case 3: return {0.5, 0.3, 0.2};
    case 4: return {0.4, 0.3, 0.2, 0.1};
    case 5: return {0.3, 0.25, 0.2, 0.15, 0.1};
  }
  throw ArgumentError("order must be in [1, 5]");
}

struct LmOptions {
  int order = 3;
  double k = 0.1;
  std::vector<double> lambdas;  // empty: default_lambdas(order)
  // Training tokens seen fewer times than this become <unk>. Values <= 1
  // keep every token.
  uint64_t min_count = 2;
  bool sentence_end = true;      // train on </s> events
  bool open_vocabulary = true;   // reserve <unk> for unseen tokens
};

class NgramLanguageModel {
 public:
  using Context = std::vector<uint32_t>;

  static NgramLanguageModel train(std::span<const TokenSequence> sentences, LmOptions opts,
                                  std::string period_label = "") {
    NgramLanguageModel lm;
    lm.set_options(std::move(opts));
    lm.label_ = std::move(period_label);

    std::map<std::string, uint64_t> freq;
    uint64_t total_tokens = 0;
    for (const auto& s : sentences) {
      for (const auto& t : s) ++freq[t];
      total_tokens += s.size();
    }
    if (total_tokens == 0) throw ArgumentError("cannot train a language model on an empty slice");

    std::vector<std::string> words;
    bool any_rare = false;
    for (const auto& [tok, n] : freq) {
      if (is_special(tok) || n < lm.opts_.min_count) {
        any_rare = true;
      } else {
        words.push_back(tok);
      }
    }
    if (any_rare && !lm.opts_.open_vocabulary) {
      throw ArgumentError("closed-vocabulary model has tokens that would map to <unk>");
    }
    lm.build_vocab(words);

    std::vector<uint32_t> padded;
    for (const auto& s : sentences) {
      if (s.empty()) continue;
      padded.assign(static_cast<size_t>(lm.opts_.order - 1), kBosId);
      for (const auto& t : s) padded.push_back(lm.encode_token(t));
      if (lm.opts_.sentence_end) padded.push_back(lm.eos_id());
      for (size_t p = static_cast<size_t>(lm.opts_.order - 1); p < padded.size(); ++p) {
        for (int j = 1; j <= lm.opts_.order; ++j) {
          Context ctx(padded.begin() + static_cast<long>(p) - (j - 1),
                      padded.begin() + static_cast<long>(p));
          auto& cc = lm.tables_[static_cast<size_t>(j - 1)][ctx];
          ++cc.total;
          ++cc.next[padded[p]];
        }
      }
      ++lm.sentences_;
    }
    lm.tokens_ = total_tokens;
    return lm;
  }

  int order() const { return opts_.order; }
  double k() const { return opts_.k; }
  const std::vector<double>& lambdas() const { return opts_.lambdas; }
  const LmOptions& options() const { return opts_; }
  const std::string& period_label() const { return label_; }
  uint64_t training_tokens() const { return tokens_; }
  uint64_t training_sentences() const { return sentences_; }

  // All symbols including <s>.
  size_t vocab_size() const { return vocab_.size(); }
  // Symbols that can be predicted: everything except <s>.
  size_t support_size() const { return vocab_.size() - 1; }
  const std::string& token(uint32_t id) const { return vocab_.at(id); }

  std::optional<uint32_t> id_of(std::string_view tok) const {
    auto it = ids_.find(std::string(tok));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  // Maps a phrase token to its id; unknown tokens (and a literal <s>) become
  // <unk>. Throws for a closed vocabulary.
  uint32_t encode_token(std::string_view tok) const {
    auto id = id_of(tok);
    if (id && *id != kBosId) return *id;
    if (!unk_id_) {
      throw ArgumentError("token '" + std::string(tok) + "' is outside the closed vocabulary");
    }
    return *unk_id_;
  }

  // Add-k estimate of order j (1 = unigram) for the last j-1 history ids.
  double component_probability(int j, std::span<const uint32_t> history, uint32_t word) const {
    const auto ctx = history.subspan(history.size() - static_cast<size_t>(j - 1));
    const auto& table = tables_[static_cast<size_t>(j - 1)];
    auto it = table.find(Context(ctx.begin(), ctx.end()));
    uint64_t c = 0, total = 0;
    if (it != table.end()) {
      total = it->second.total;
      if (auto w = it->second.next.find(word); w != it->second.next.end()) c = w->second;
    }
    return (static_cast<double>(c) + opts_.k) /
           (static_cast<double>(total) + opts_.k * static_cast<double>(support_size()));
  }

  // Interpolated p(word | history). `history` must hold at least order-1
  // ids; only the last order-1 are used.
  double probability(std::span<const uint32_t> history, uint32_t word) const {
    if (history.size() + 1 < static_cast<size_t>(opts_.order)) {
      throw ArgumentError("history shorter than order - 1");
    }
    double p = 0;
    for (int j = opts_.order; j >= 1; --j) {
      p += opts_.lambdas[static_cast<size_t>(opts_.order - j)] *
           component_probability(j, history, word);
    }
    return p;
  }

  // p(w_k | w_1..w_{k-1}) for every phrase token, with <s> left padding.
  std::vector<double> step_probabilities(const TokenSequence& phrase) const {
    if (phrase.empty()) throw ArgumentError("empty phrase");
    std::vector<uint32_t> history(static_cast<size_t>(opts_.order - 1), kBosId);
    std::vector<double> out;
    out.reserve(phrase.size());
    for (const auto& t : phrase) {
      const uint32_t id = encode_token(t);
      out.push_back(probability(history, id));
      history.push_back(id);
    }
    return out;
  }

  std::vector<double> token_logprobs(const TokenSequence& phrase) const {
    auto steps = step_probabilities(phrase);
    for (double& p : steps) p = std::log(p);
    return steps;
  }

  // Natural-log joint probability of the phrase tokens.
  double sequence_log_prob(const TokenSequence& phrase) const {
    double lp = 0;
    for (double x : token_logprobs(phrase)) lp += x;
    return lp;
  }

  // Contexts observed at order j, for normalization checks.
  std::vector<Context> observed_contexts(int j) const {
    std::vector<Context> out;
    for (const auto& [ctx, cc] : tables_.at(static_cast<size_t>(j - 1))) out.push_back(ctx);
    return out;
  }

  // ---- store ------------------------------------------------------------
  //
  // <dir>/meta.json   options, vocabulary size and period label
  // <dir>/counts.bin  "SLLM" | u32 version | u32 order | u32 vocab size |
  //                   vocab (u16 len + bytes, id order) |
  //                   per order j: u64 entries, then entries sorted by
  //                   (context, word): j x u32 ids | u64 count

  void save(const fs::path& dir) const {
    write_file_atomic(dir / "counts.bin", counts_bytes());
    write_file_atomic(dir / "meta.json", metadata().dump(2) + "\n");
  }

  std::string counts_bytes() const {
    std::string bin("SLLM");
    detail::put_le<uint32_t>(bin, kStoreVersion);
    detail::put_le<uint32_t>(bin, static_cast<uint32_t>(opts_.order));
    detail::put_le<uint32_t>(bin, static_cast<uint32_t>(vocab_.size()));
    for (const auto& v : vocab_) {
      if (v.size() > 0xffff) throw ArgumentError("token longer than 65535 bytes");
      detail::put_le<uint16_t>(bin, static_cast<uint16_t>(v.size()));
      bin += v;
    }
    for (const auto& table : tables_) {
      uint64_t entries = 0;
      for (const auto& [ctx, cc] : table) entries += cc.next.size();
      detail::put_le<uint64_t>(bin, entries);
      for (const auto& [ctx, cc] : table) {
        for (const auto& [w, n] : cc.next) {
          for (uint32_t id : ctx) detail::put_le<uint32_t>(bin, id);
          detail::put_le<uint32_t>(bin, w);
          detail::put_le<uint64_t>(bin, n);
        }
      }
    }
    return bin;
  }

  static NgramLanguageModel load(const fs::path& dir) {
    const std::string where = dir.string();
    nlohmann::json meta;
    try {
      meta = nlohmann::json::parse(read_file(dir / "meta.json"));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + "/meta.json: " + e.what());
    }
    NgramLanguageModel lm;
    try {
      if (meta.at("format") != "shiftlens-lm" || meta.at("version") != kStoreVersion) {
        throw FormatError(where + ": not a version-1 language model store");
      }
      LmOptions o;
      o.order = meta.at("order").get<int>();
      o.k = meta.at("k").get<double>();
      o.lambdas = meta.at("lambdas").get<std::vector<double>>();
      o.min_count = meta.at("min_count").get<uint64_t>();
      o.sentence_end = meta.at("sentence_end").get<bool>();
      o.open_vocabulary = meta.at("open_vocabulary").get<bool>();
      lm.set_options(std::move(o));
      lm.label_ = meta.at("period_label").get<std::string>();
      lm.tokens_ = meta.at("training_tokens").get<uint64_t>();
      lm.sentences_ = meta.at("training_sentences").get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + "/meta.json: " + e.what());
    } catch (const ArgumentError& e) {
      throw FormatError(where + "/meta.json: " + e.what());
    }

    const std::string bin = read_file(dir / "counts.bin");
    detail::LeReader in(bin, where + "/counts.bin");
    if (in.take(4) != "SLLM") throw FormatError(where + "/counts.bin: bad magic");
    if (in.get<uint32_t>() != kStoreVersion) throw FormatError(where + "/counts.bin: bad version");
    if (in.get<uint32_t>() != static_cast<uint32_t>(lm.opts_.order)) {
      throw FormatError(where + ": order disagrees between meta.json and counts.bin");
    }
    const auto vsize = in.get<uint32_t>();
    if (vsize != meta.at("vocab_size").get<uint32_t>()) {
      throw FormatError(where + ": vocab size disagrees between meta.json and counts.bin");
    }
    std::vector<std::string> vocab;
    for (uint32_t i = 0; i < vsize; ++i) vocab.emplace_back(in.take(in.get<uint16_t>()));
    lm.adopt_vocab(std::move(vocab), where);
    for (int j = 1; j <= lm.opts_.order; ++j) {
      const auto entries = in.get<uint64_t>();
      auto& table = lm.tables_[static_cast<size_t>(j - 1)];
      for (uint64_t e = 0; e < entries; ++e) {
        Context ctx(static_cast<size_t>(j - 1));
        for (auto& id : ctx) id = in.get<uint32_t>();
        const auto w = in.get<uint32_t>();
        const auto n = in.get<uint64_t>();
        const bool bad_id = w >= vsize || w == kBosId ||
                            std::any_of(ctx.begin(), ctx.end(), [&](uint32_t id) { return id >= vsize; });
        if (bad_id || n == 0) throw FormatError(where + "/counts.bin: invalid entry");
        auto& cc = table[ctx];
        if (!cc.next.emplace(w, n).second) throw FormatError(where + "/counts.bin: duplicate entry");
        cc.total += n;
      }
    }
    if (in.remaining() != 0) throw FormatError(where + "/counts.bin: trailing bytes");
    return lm;
  }

  nlohmann::json metadata() const {
    return {{"format", "shiftlens-lm"},
            {"version", kStoreVersion},
            {"order", opts_.order},
            {"k", opts_.k},
            {"lambdas", opts_.lambdas},
            {"min_count", opts_.min_count},
            {"sentence_end", opts_.sentence_end},
            {"open_vocabulary", opts_.open_vocabulary},
            {"vocab_size", vocab_.size()},
            {"period_label", label_},
            {"training_tokens", tokens_},
            {"training_sentences", sentences_}};
  }

 private:
  struct ContextCounts {
    uint64_t total = 0;
    std::map<uint32_t, uint64_t> next;
  };

  static constexpr uint32_t kBosId = 0;
  static constexpr uint32_t kStoreVersion = 1;

  static bool is_special(std::string_view t) {
    return t == kBosToken || t == kEosToken || t == kUnkToken;
  }

  void set_options(LmOptions opts) {
    if (opts.order < 1 || opts.order > 5) throw ArgumentError("order must be in [1, 5]");
    if (!(opts.k > 0) || !std::isfinite(opts.k)) throw ArgumentError("k must be positive");
    if (opts.lambdas.empty()) opts.lambdas = default_lambdas(opts.order);
    if (opts.lambdas.size() != static_cast<size_t>(opts.order)) {
      throw ArgumentError("need one interpolation weight per order");
    }
    double sum = 0;
    for (double l : opts.lambdas) {
      if (!(l >= 0)) throw ArgumentError("interpolation weights must be non-negative");
      sum += l;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ArgumentError("interpolation weights must sum to 1");
    opts_ = std::move(opts);
    tables_.assign(static_cast<size_t>(opts_.order), {});
  }

  uint32_t eos_id() const { return *id_of(kEosToken); }

  void build_vocab(const std::vector<std::string>& words) {
    std::vector<std::string> v{std::string(kBosToken)};
    if (opts_.sentence_end) v.emplace_back(kEosToken);
    if (opts_.open_vocabulary) v.emplace_back(kUnkToken);
    v.insert(v.end(), words.begin(), words.end());
    adopt_vocab(std::move(v), "vocabulary");
  }

  void adopt_vocab(std::vector<std::string> v, const std::string& where) {
    vocab_ = std::move(v);
    ids_.clear();
    for (uint32_t i = 0; i < vocab_.size(); ++i) {
      if (!ids_.emplace(vocab_[i], i).second) throw FormatError(where + ": duplicate token");
    }
    if (vocab_.empty() || vocab_[0] != kBosToken) throw FormatError(where + ": <s> must be id 0");
    if (opts_.sentence_end != ids_.count(std::string(kEosToken)) ||
        opts_.open_vocabulary != ids_.count(std::string(kUnkToken))) {
      throw FormatError(where + ": special symbols disagree with options");
    }
    unk_id_ = id_of(kUnkToken);
    if (support_size() == 0) throw FormatError(where + ": empty vocabulary");
  }

  LmOptions opts_;
  std::string label_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, uint32_t> ids_;
  std::optional<uint32_t> unk_id_;
  std::vector<std::map<Context, ContextCounts>> tables_;
  uint64_t tokens_ = 0;
  uint64_t sentences_ = 0;
};

// ---------------------------------------------------------------------------
// Perplexity

struct PerplexityReport {
  TokenSequence phrase;
  double log_prob = 0;   // natural log
  size_t token_count = 0;
  double perplexity = 0;
};

// PP = exp(-log_prob / N).
inline PerplexityReport make_perplexity_report(TokenSequence phrase, double log_prob) {
  if (phrase.empty()) throw ArgumentError("empty phrase");
  if (!std::isfinite(log_prob) || log_prob > 0) {
    throw ArgumentError("log probability must be finite and <= 0");
  }
  PerplexityReport r;
  r.token_count = phrase.size();
  r.phrase = std::move(phrase);
  r.log_prob = log_prob;
  r.perplexity = std::exp(-log_prob / static_cast<double>(r.token_count));
  return r;
}

inline PerplexityReport perplexity(const NgramLanguageModel& lm, const TokenSequence& phrase) {
  return make_perplexity_report(phrase, lm.sequence_log_prob(phrase));
}

// A phrase set scored under one model; mean_perplexity is the plain average
// of the member perplexities.
struct PerplexitySummary {
  std::vector<PerplexityReport> reports;
  double mean_perplexity = 0;

  std::vector<double> perplexities() const {
    std::vector<double> out;
    for (const auto& r : reports) out.push_back(r.perplexity);
    return out;
  }
};

inline PerplexitySummary summarize(std::vector<PerplexityReport> reports) {
  if (reports.empty()) throw ArgumentError("cannot summarize an empty phrase set");
  PerplexitySummary s;
  double sum = 0;
  for (const auto& r : reports) sum += r.perplexity;
  s.mean_perplexity = sum / static_cast<double>(reports.size());
  s.reports = std::move(reports);
  return s;
}

// ---------------------------------------------------------------------------
// Probe phrases

inline const std::vector<std::string>& default_online_markers() {
  static const std::vector<std::string> m = {"online", "via zoom", "via microsoft teams",
                                             "via google meet"};
  return m;
}

struct ProbePhraseSet {
  std::string activity;
  Modality modality = Modality::kOffline;
  std::vector<TokenSequence> phrases;

  std::vector<std::string> texts() const {
    std::vector<std::string> out;
    for (const auto& p : phrases) out.push_back(join_tokens(p));
    return out;
  }
};

// Offline: the base phrase and its paraphrases. Online: every offline
// phrase with each marker appended.
inline ProbePhraseSet build_probe_phrases(std::string activity, std::string_view base,
                                          const std::vector<std::string>& paraphrases,
                                          Modality modality,
                                          const std::vector<std::string>& online_markers =
                                              default_online_markers()) {
  auto base_tokens = tokenize(normalize_text(base));
  if (base_tokens.empty()) throw ArgumentError("empty base phrase");
  std::vector<TokenSequence> offline{base_tokens};
  for (const auto& p : paraphrases) {
    auto t = tokenize(normalize_text(p));
    if (t.empty()) throw ArgumentError("empty paraphrase");
    if (std::find(offline.begin(), offline.end(), t) == offline.end()) offline.push_back(std::move(t));
  }
  ProbePhraseSet set{std::move(activity), modality, {}};
  if (modality == Modality::kOffline) {
    set.phrases = std::move(offline);
    return set;
  }
  if (online_markers.empty()) throw ArgumentError("online probes need at least one marker");
  std::vector<TokenSequence> markers;
  for (const auto& m : online_markers) {
    auto t = tokenize(normalize_text(m));
    if (t.empty()) throw ArgumentError("empty online marker");
    markers.push_back(std::move(t));
  }
  for (const auto& phrase : offline) {
    for (const auto& m : markers) {
      TokenSequence p = phrase;
      p.insert(p.end(), m.begin(), m.end());
      set.phrases.push_back(std::move(p));
    }
  }
  return set;
}

struct ProbeDefinition {
  std::string activity;
  std::string base;
  std::vector<std::string> paraphrases;
  std::vector<std::string> markers = default_online_markers();

  ProbePhraseSet build(Modality m) const {
    return build_probe_phrases(activity, base, paraphrases, m, markers);
  }
};

// Accepts {"activities": [...], "markers": [...]} or a bare array of
// {"activity", "base", "paraphrases", "markers"} objects.
inline std::vector<ProbeDefinition> probe_definitions_from_json(const nlohmann::json& j) {
  try {
    const auto& list = j.is_array() ? j : j.at("activities");
    std::vector<std::string> shared = default_online_markers();
    if (j.is_object() && j.contains("markers")) shared = j.at("markers").get<std::vector<std::string>>();
    std::vector<ProbeDefinition> out;
    for (const auto& e : list) {
      ProbeDefinition d;
      d.activity = e.at("activity").get<std::string>();
      d.base = e.at("base").get<std::string>();
      d.paraphrases = e.value("paraphrases", std::vector<std::string>{});
      d.markers = e.contains("markers") ? e.at("markers").get<std::vector<std::string>>() : shared;
      out.push_back(std::move(d));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("probe phrases: ") + e.what());
  }
}

inline nlohmann::json perplexity_summary_json(const PerplexitySummary& s) {
  auto rows = nlohmann::json::array();
  for (const auto& r : s.reports) {
    rows.push_back({{"phrase", join_tokens(r.phrase)},
                    {"tokens", r.token_count},
                    {"log_prob", r.log_prob},
                    {"perplexity", r.perplexity}});
  }
  return {{"phrases", rows}, {"mean_perplexity", s.mean_perplexity}};
}

// ---------------------------------------------------------------------------
// Externally computed token log-probabilities, one JSON object per line:
//   {"phrase": [tokens], "token_logprobs": [floats], "period": "2020-07"}
// Optional "activity" and "modality" fields group phrases into probe sets.

struct ImportedScore {
  std::string period;
  std::string activity;
  std::optional<Modality> modality;
  std::vector<double> token_logprobs;
  PerplexityReport report;
};

inline ImportedScore parse_logprob_record(std::string_view line, const std::string& where) {
  nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
  if (rec.is_discarded() || !rec.is_object()) throw FormatError(where + ": not a JSON object");
  ImportedScore s;
  TokenSequence phrase;
  try {
    phrase = rec.at("phrase").get<TokenSequence>();
    s.period = rec.at("period").get<std::string>();
    s.activity = rec.value("activity", "");
    if (rec.contains("modality")) s.modality = parse_modality(rec.at("modality").get<std::string>());
    const auto& lps = rec.at("token_logprobs");
    if (!lps.is_array()) throw FormatError(where + ": token_logprobs is not an array");
    for (const auto& v : lps) {
      if (!v.is_number()) throw FormatError(where + ": non-numeric log-prob");
      s.token_logprobs.push_back(v.get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(where + ": " + e.what());
  } catch (const ArgumentError& e) {
    throw FormatError(where + ": " + e.what());
  }
  if (phrase.empty()) throw FormatError(where + ": empty phrase");
  if (phrase.size() != s.token_logprobs.size()) {
    throw FormatError(where + ": " + std::to_string(phrase.size()) + " tokens but " +
                      std::to_string(s.token_logprobs.size()) + " log-probs");
  }
  double sum = 0;
  for (double lp : s.token_logprobs) {
    if (!std::isfinite(lp)) throw FormatError(where + ": non-finite log-prob");
    if (lp > 0) throw FormatError(where + ": positive log-prob");
    sum += lp;
  }
  s.report = make_perplexity_report(std::move(phrase), sum);
  return s;
}

inline std::vector<ImportedScore> import_token_logprobs(const fs::path& path) {
  std::vector<ImportedScore> out;
  size_t line_no = 0;
  for_each_line(path, [&](std::string_view line) {
    ++line_no;
    if (line.empty()) return;
    out.push_back(parse_logprob_record(line, path.string() + ":" + std::to_string(line_no)));
  });
  return out;
}

inline std::string export_token_logprobs(const std::vector<ImportedScore>& scores) {
  std::string out;
  for (const auto& s : scores) {
    nlohmann::json rec = {{"phrase", s.report.phrase},
                          {"token_logprobs", s.token_logprobs},
                          {"period", s.period}};
    if (!s.activity.empty()) rec["activity"] = s.activity;
    if (s.modality) rec["modality"] = std::string(modality_name(*s.modality));
    out += rec.dump() + "\n";
  }
  return out;
}

// Scores a probe set under the model in the import format, so internal and
// external scores share one downstream path.
inline std::vector<ImportedScore> score_for_export(const NgramLanguageModel& lm,
                                                   const ProbePhraseSet& probes) {
  std::vector<ImportedScore> out;
  for (const auto& p : probes.phrases) {
    ImportedScore s;
    s.period = lm.period_label();
    s.activity = probes.activity;
    s.modality = probes.modality;
    s.token_logprobs = lm.token_logprobs(p);
    double sum = 0;
    for (double lp : s.token_logprobs) sum += lp;
    s.report = make_perplexity_report(p, sum);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace shiftlens

#endif  // SHIFTLENS_LM_HPP_
