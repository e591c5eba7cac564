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

// Shift statistics between two periods.
//
// Sign convention: a positive t always means the activity is discussed
// more in the later period. Perplexity tests use PP_pre - PP_during (lower
// perplexity during means more), frequency tests use count_during -
// count_pre.

#ifndef SHIFTLENS_SHIFT_HPP_
#define SHIFTLENS_SHIFT_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "shiftlens/corpus.hpp"
#include "shiftlens/error.hpp"
#include "shiftlens/io.hpp"
#include "shiftlens/lm.hpp"
#include "shiftlens/modality.hpp"
#include "shiftlens/stats.hpp"
#include "shiftlens/text.hpp"

namespace shiftlens {

inline constexpr double kSignificanceLevel = 0.05;

enum class Direction { kMore, kLess, kNone };

inline std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::kMore: return "more";
    case Direction::kLess: return "less";
    case Direction::kNone: return "none";
  }
  return "none";
}

inline Direction direction_of(double t) {
  if (t > 0) return Direction::kMore;
  if (t < 0) return Direction::kLess;
  return Direction::kNone;
}

struct ShiftTestResult {
  std::string activity;
  std::optional<Modality> modality;
  std::pair<std::string, std::string> months;  // (pre, during)
  double t_value = 0;
  double p_value = 1;
  int df = 0;
  Direction direction = Direction::kNone;
  bool significant = false;
  size_t n = 0;              // phrases or days
  double mean_pre = 0;       // mean perplexity or mean daily count
  double mean_during = 0;
  nlohmann::json variant_flags = nlohmann::json::object();
};

inline ShiftTestResult make_shift_result(const TTestResult& r) {
  ShiftTestResult s;
  s.t_value = r.t;
  s.p_value = r.p;
  s.df = r.df;
  s.direction = direction_of(r.t);
  s.significant = r.p < kSignificanceLevel;
  return s;
}

// ---------------------------------------------------------------------------
// Perplexity shift

struct PerplexityShiftOptions {
  // Student two-sample test on the two perplexity sets instead of the
  // per-phrase paired test.
  bool unpaired = false;
};

inline ShiftTestResult perplexity_shift(const PerplexitySummary& pre,
                                        const PerplexitySummary& during,
                                        PerplexityShiftOptions opts = {}) {
  if (pre.reports.size() < 2 || during.reports.size() < 2) {
    throw ArgumentError("perplexity shift needs at least two probe phrases");
  }
  const auto a = pre.perplexities(), b = during.perplexities();
  TTestResult r;
  if (opts.unpaired) {
    r = two_sample_t_test(a, b);
  } else {
    if (a.size() != b.size()) throw ArgumentError("paired perplexity sets differ in size");
    for (size_t i = 0; i < a.size(); ++i) {
      if (pre.reports[i].phrase != during.reports[i].phrase) {
        throw ArgumentError("paired perplexity sets list different phrases");
      }
    }
    r = paired_t_test(a, b);
  }
  auto s = make_shift_result(r);
  s.n = a.size();
  s.mean_pre = pre.mean_perplexity;
  s.mean_during = during.mean_perplexity;
  s.variant_flags = {{"test", opts.unpaired ? "two_sample" : "paired"},
                     {"difference", "pp_pre_minus_pp_during"}};
  return s;
}

inline PerplexitySummary score_probes(const NgramLanguageModel& lm, const ProbePhraseSet& probes) {
  std::vector<PerplexityReport> reports;
  for (const auto& p : probes.phrases) reports.push_back(perplexity(lm, p));
  return summarize(std::move(reports));
}

inline ShiftTestResult perplexity_shift(const NgramLanguageModel& lm_pre,
                                        const NgramLanguageModel& lm_during,
                                        const ProbePhraseSet& probes,
                                        PerplexityShiftOptions opts = {}) {
  if (probes.phrases.size() < 2) throw ArgumentError("perplexity shift needs at least two probe phrases");
  auto s = perplexity_shift(score_probes(lm_pre, probes), score_probes(lm_during, probes), opts);
  s.activity = probes.activity;
  s.modality = probes.modality;
  s.months = {lm_pre.period_label(), lm_during.period_label()};
  return s;
}

// Imported scores for one activity and modality, split by period.
inline std::pair<PerplexitySummary, PerplexitySummary> imported_pair(
    const std::vector<ImportedScore>& scores, const std::string& pre_period,
    const std::string& during_period, const std::string& activity,
    std::optional<Modality> modality) {
  std::vector<PerplexityReport> pre, during;
  for (const auto& s : scores) {
    if (!activity.empty() && s.activity != activity) continue;
    if (modality && s.modality != modality) continue;
    if (s.period == pre_period) pre.push_back(s.report);
    if (s.period == during_period) during.push_back(s.report);
  }
  if (pre.empty() || during.empty()) {
    throw ArgumentError("imported scores lack phrases for period " +
                        (pre.empty() ? pre_period : during_period));
  }
  return {summarize(std::move(pre)), summarize(std::move(during))};
}

// ---------------------------------------------------------------------------
// Frequency shift

struct FrequencyShiftOptions {
  // Drop leading pre-period days until both series start on the same
  // weekday, then truncate to the common length.
  bool weekday_align = false;
  // Standardize d by the sd of the daily differences instead of the pooled
  // sd of the two samples.
  bool paired_d = false;
};

struct FrequencyShiftResult {
  ShiftTestResult test;
  EffectSize effect;
  size_t pre_offset = 0;  // leading pre days dropped by weekday alignment
};

namespace detail {

inline unsigned weekday_of(Date d) { return std::chrono::weekday(d).c_encoding(); }

}  // namespace detail

// A constant nonzero daily difference (or two constant, different series)
// has no finite t or d; it is reported as t = d = +/-inf with p = 0.
inline FrequencyShiftResult frequency_shift(const FrequencySeries& pre,
                                            const FrequencySeries& during,
                                            FrequencyShiftOptions opts = {}) {
  size_t offset = 0, n = pre.day_counts.size();
  if (opts.weekday_align) {
    if (pre.day_counts.empty() || during.day_counts.empty()) {
      throw ArgumentError("frequency shift needs nonempty series");
    }
    const unsigned target = detail::weekday_of(during.day_counts.front().date);
    while (offset < pre.day_counts.size() &&
           detail::weekday_of(pre.day_counts[offset].date) != target) {
      ++offset;
    }
    n = std::min(pre.day_counts.size() - offset, during.day_counts.size());
  } else if (pre.day_counts.size() != during.day_counts.size()) {
    throw ArgumentError("frequency series differ in length (" +
                        std::to_string(pre.day_counts.size()) + " vs " +
                        std::to_string(during.day_counts.size()) + " days)");
  }
  if (n < 2) throw ArgumentError("frequency shift needs at least two aligned days");

  const auto all_pre = pre.values(), all_during = during.values();
  const std::span<const double> a(all_during.data(), n);
  const std::span<const double> b(all_pre.data() + offset, n);

  FrequencyShiftResult out;
  out.pre_offset = offset;
  bool degenerate = false;
  try {
    out.test = make_shift_result(paired_t_test(a, b));
  } catch (const DegenerateVarianceError&) {
    degenerate = true;
    TTestResult r;
    r.df = static_cast<int>(n - 1);
    r.t = a[0] > b[0] ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
    r.p = 0;
    out.test = make_shift_result(r);
  }
  try {
    out.effect = opts.paired_d ? cohens_d_paired(a, b) : cohens_d(a, b);
  } catch (const DegenerateVarianceError&) {
    degenerate = true;
    out.effect = make_effect_size(mean(a) > mean(b) ? std::numeric_limits<double>::infinity()
                                                    : -std::numeric_limits<double>::infinity());
  }
  auto& t = out.test;
  t.activity = during.activity.empty() ? pre.activity : during.activity;
  t.months = {pre.period_label, during.period_label};
  t.n = n;
  t.mean_pre = mean(b);
  t.mean_during = mean(a);
  t.variant_flags = {{"test", "paired"},
                     {"difference", "count_during_minus_count_pre"},
                     {"alignment", opts.weekday_align ? "weekday" : "day_offset"},
                     {"pre_offset_days", offset},
                     {"effect_size", opts.paired_d ? "paired_sd" : "pooled_sd"},
                     {"degenerate_variance", degenerate}};
  return out;
}

// ---------------------------------------------------------------------------
// Log-odds ratio with an informed Dirichlet prior

using TokenCounts = std::map<std::string, uint64_t>;

// Counts lexical tokens; sentinels and bare punctuation are skipped.
inline TokenCounts count_tokens(std::span<const TokenSequence> docs) {
  TokenCounts c;
  for (const auto& d : docs) {
    for (const auto& t : d) {
      if (is_lexical_token(t)) ++c[t];
    }
  }
  return c;
}

struct LexicalEntry {
  std::string token;
  uint64_t count_i = 0;
  uint64_t count_j = 0;
  double delta = 0;
  double variance = 0;
  double z = 0;
};

struct LexicalShiftReport {
  std::string activity;
  std::string corpus_i;
  std::string corpus_j;
  double alpha0 = 0;
  uint64_t min_count = 0;
  uint64_t n_i = 0;
  uint64_t n_j = 0;
  std::vector<LexicalEntry> entries;  // z descending, ties by token
};

inline constexpr double kDefaultAlpha0 = 1000;
inline constexpr uint64_t kDefaultLexicalMinCount = 10;

// alpha_w = alpha0 * b_w / sum_v b_v with b = counts_i + counts_j.
inline std::map<std::string, double> dirichlet_priors(const TokenCounts& counts_i,
                                                      const TokenCounts& counts_j,
                                                      double alpha0) {
  TokenCounts background = counts_i;
  for (const auto& [w, c] : counts_j) background[w] += c;
  uint64_t total = 0;
  for (const auto& [w, c] : background) total += c;
  std::map<std::string, double> priors;
  for (const auto& [w, c] : background) {
    if (c > 0) priors[w] = alpha0 * static_cast<double>(c) / static_cast<double>(total);
  }
  return priors;
}

namespace detail {

inline double log_odds_term(double y, double n, double alpha, double alpha0) {
  return std::log((y + alpha) / (n + alpha0 - y - alpha));
}

inline uint64_t count_of(const TokenCounts& c, const std::string& w) {
  auto it = c.find(w);
  return it == c.end() ? 0 : it->second;
}

}  // namespace detail

inline LexicalShiftReport log_odds_dirichlet(const TokenCounts& counts_i, const TokenCounts& counts_j,
                                             double alpha0 = kDefaultAlpha0,
                                             uint64_t min_count = kDefaultLexicalMinCount) {
  if (!(alpha0 > 0) || !std::isfinite(alpha0)) throw ArgumentError("alpha0 must be positive");
  LexicalShiftReport r;
  r.alpha0 = alpha0;
  r.min_count = min_count;
  for (const auto& [w, c] : counts_i) r.n_i += c;
  for (const auto& [w, c] : counts_j) r.n_j += c;
  if (r.n_i == 0 || r.n_j == 0) throw ArgumentError("log-odds needs two nonempty corpora");
  const auto priors = dirichlet_priors(counts_i, counts_j, alpha0);
  if (priors.size() < 2) throw ArgumentError("log-odds needs at least two distinct tokens");

  const double ni = static_cast<double>(r.n_i), nj = static_cast<double>(r.n_j);
  for (const auto& [w, alpha] : priors) {
    const uint64_t ci = detail::count_of(counts_i, w), cj = detail::count_of(counts_j, w);
    if (ci + cj < min_count) continue;
    const double yi = static_cast<double>(ci), yj = static_cast<double>(cj);
    LexicalEntry e{w, ci, cj, 0, 0, 0};
    e.delta = detail::log_odds_term(yi, ni, alpha, alpha0) - detail::log_odds_term(yj, nj, alpha, alpha0);
    e.variance = 1 / (yi + alpha) + 1 / (yj + alpha);
    e.z = e.delta / std::sqrt(e.variance);
    r.entries.push_back(std::move(e));
  }
  std::sort(r.entries.begin(), r.entries.end(), [](const LexicalEntry& a, const LexicalEntry& b) {
    if (a.z != b.z) return a.z > b.z;
    return a.token < b.token;
  });
  return r;
}

// The n entries most representative of corpus i.
inline std::vector<LexicalEntry> top_tokens(const LexicalShiftReport& report, size_t n = 100) {
  if (n < 1) throw ArgumentError("top_tokens needs n >= 1");
  const size_t k = std::min(n, report.entries.size());
  return {report.entries.begin(), report.entries.begin() + static_cast<long>(k)};
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json json_number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return nullptr;
  return x > 0 ? "inf" : "-inf";
}

inline nlohmann::json shift_result_json(const ShiftTestResult& s,
                                        std::optional<double> alpha0 = std::nullopt) {
  return {{"activity", s.activity},
          {"modality", s.modality ? nlohmann::json(std::string(modality_name(*s.modality)))
                                  : nlohmann::json(nullptr)},
          {"months", {s.months.first, s.months.second}},
          {"t", json_number(s.t_value)},
          {"p", s.p_value},
          {"df", s.df},
          {"direction", std::string(direction_name(s.direction))},
          {"significant", s.significant},
          {"alpha0", alpha0 ? nlohmann::json(*alpha0) : nlohmann::json(nullptr)},
          {"n", s.n},
          {"mean_pre", s.mean_pre},
          {"mean_during", s.mean_during},
          {"variant_flags", s.variant_flags}};
}

inline nlohmann::json frequency_shift_json(const FrequencyShiftResult& f) {
  auto j = shift_result_json(f.test);
  j["cohens_d"] = json_number(f.effect.d);
  j["magnitude"] = std::string(magnitude_name(f.effect.magnitude));
  return j;
}

inline std::string lexical_csv(const LexicalShiftReport& r) {
  std::string out = "token,count_i,count_j,delta,z\n";
  for (const auto& e : r.entries) {
    out += e.token + "," + std::to_string(e.count_i) + "," + std::to_string(e.count_j) + "," +
           format_double(e.delta) + "," + format_double(e.z) + "\n";
  }
  return out;
}

inline nlohmann::json lexical_report_json(const LexicalShiftReport& r) {
  auto entries = nlohmann::json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"token", e.token},
                       {"count_i", e.count_i},
                       {"count_j", e.count_j},
                       {"delta", e.delta},
                       {"variance", e.variance},
                       {"z", e.z}});
  }
  return {{"activity", r.activity}, {"corpus_i", r.corpus_i}, {"corpus_j", r.corpus_j},
          {"alpha0", r.alpha0},     {"min_count", r.min_count}, {"n_i", r.n_i},
          {"n_j", r.n_j},           {"entries", entries}};
}

}  // namespace shiftlens

#endif  // SHIFTLENS_SHIFT_HPP_
