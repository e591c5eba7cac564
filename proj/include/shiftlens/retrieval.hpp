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

// Three-stage weak-label retrieval:
//
//   1. the centroid of a seed corpus (posts known to be about an activity)
//      is the first query;
//   2. its top-k nearest documents form the anchor set;
//   3. the anchors query the corpus again, and every document whose cosine
//      clears the activity's threshold is matched.
//
// Stage 3 scores against the anchor centroid by default; ExpandMode::kMax
// scores each document by its best anchor instead.

#ifndef SHIFTLENS_RETRIEVAL_HPP_
#define SHIFTLENS_RETRIEVAL_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "shiftlens/corpus.hpp"
#include "shiftlens/embedding.hpp"
#include "shiftlens/error.hpp"

namespace shiftlens {

enum class ExpandMode { kCentroid, kMax };

inline std::string_view expand_mode_name(ExpandMode m) {
  return m == ExpandMode::kCentroid ? "centroid" : "max";
}

inline ExpandMode parse_expand_mode(std::string_view s) {
  if (s == "centroid") return ExpandMode::kCentroid;
  if (s == "max") return ExpandMode::kMax;
  throw ArgumentError("unknown expand mode '" + std::string(s) + "' (centroid|max)");
}

inline constexpr size_t kDefaultAnchors = 100;

// Thresholds tuned by manual inspection for the activities that have a seed
// corpus. Other activities must configure one explicitly.
inline std::optional<double> default_threshold(std::string_view activity) {
  static const std::map<std::string, double, std::less<>> kDefaults = {
      {"meditation", 0.61}, {"prayer", 0.61}, {"yoga", 0.55}};
  auto it = kDefaults.find(activity);
  if (it == kDefaults.end()) return std::nullopt;
  return it->second;
}

struct ActivityQuerySpec {
  std::string activity;
  size_t k_anchors = kDefaultAnchors;
  std::optional<double> threshold;  // falls back to default_threshold()
  ExpandMode expand = ExpandMode::kCentroid;

  double resolved_threshold() const {
    auto t = threshold ? threshold : default_threshold(activity);
    if (!t) {
      throw ValidationError("activity '" + activity +
                            "' has no default threshold; set one explicitly");
    }
    return *t;
  }
};

struct RetrievalResult {
  std::string activity;
  std::vector<ScoredId> anchors;  // stage 2, best first
  std::vector<ScoredId> matched;  // stage 3, descending score then id
  double threshold_used = 0;
  ExpandMode expand = ExpandMode::kCentroid;
  size_t k_anchors = kDefaultAnchors;

  std::vector<std::string> matched_ids() const {
    std::vector<std::string> ids;
    ids.reserve(matched.size());
    for (const auto& m : matched) ids.push_back(m.id);
    return ids;
  }
};

inline bool clears_threshold(double score, double threshold) { return score >= threshold; }

inline void check_threshold(double t) {
  if (!(t >= -1.0 && t <= 1.0)) {
    throw ArgumentError("threshold " + std::to_string(t) + " outside [-1, 1]");
  }
}

inline Vector build_seed_query(std::span<const Vector> seed_vectors) {
  if (seed_vectors.empty()) throw ArgumentError("empty seed set");
  return centroid(seed_vectors);
}

inline std::vector<ScoredId> select_anchor_set(std::span<const float> query,
                                               const EmbeddingIndex& index, size_t k) {
  return top_k_similar(query, index, k);
}

// Stage-3 score of every index entry, in index order.
inline std::vector<double> expansion_scores(std::span<const Vector> anchors,
                                            const EmbeddingIndex& index, ExpandMode mode) {
  if (anchors.empty()) throw ArgumentError("empty anchor set");
  if (mode == ExpandMode::kCentroid) return index.scores(centroid(anchors));
  std::vector<double> best(index.size(), -1.0);
  for (const auto& a : anchors) {
    const auto s = index.scores(a);
    for (size_t i = 0; i < s.size(); ++i) best[i] = std::max(best[i], s[i]);
  }
  return best;
}

inline RetrievalResult expand_and_filter(std::span<const Vector> anchors,
                                         const EmbeddingIndex& index, double threshold,
                                         ExpandMode mode = ExpandMode::kCentroid) {
  check_threshold(threshold);
  const auto scores = expansion_scores(anchors, index, mode);
  RetrievalResult r;
  r.threshold_used = threshold;
  r.expand = mode;
  for (size_t i = 0; i < index.size(); ++i) {
    if (clears_threshold(scores[i], threshold)) r.matched.push_back({index.id(i), scores[i]});
  }
  std::sort(r.matched.begin(), r.matched.end(), ranks_before);
  return r;
}

inline std::vector<Vector> vectors_for(const EmbeddingIndex& index,
                                       const std::vector<ScoredId>& ids) {
  std::vector<Vector> out;
  out.reserve(ids.size());
  for (const auto& s : ids) {
    auto pos = index.find(s.id);
    if (!pos) throw ArgumentError("id '" + s.id + "' not in index");
    auto v = index.vector(*pos);
    out.emplace_back(v.begin(), v.end());
  }
  return out;
}

// All three stages.
inline RetrievalResult retrieve(const ActivityQuerySpec& spec,
                                std::span<const Vector> seed_vectors,
                                const EmbeddingIndex& index) {
  const double threshold = spec.resolved_threshold();
  if (spec.k_anchors == 0) throw ArgumentError("k_anchors must be >= 1");
  const Vector query = build_seed_query(seed_vectors);
  auto anchors = select_anchor_set(query, index, spec.k_anchors);
  RetrievalResult r = expand_and_filter(vectors_for(index, anchors), index, threshold, spec.expand);
  r.activity = spec.activity;
  r.anchors = std::move(anchors);
  r.k_anchors = spec.k_anchors;
  return r;
}

struct SweepPoint {
  double threshold = 0;
  size_t matches = 0;
};

// Match counts for each threshold on a strictly increasing grid in [-1, 1].
inline std::vector<SweepPoint> threshold_sweep(std::span<const Vector> anchors,
                                               const EmbeddingIndex& index,
                                               std::span<const double> grid,
                                               ExpandMode mode = ExpandMode::kCentroid) {
  for (size_t i = 0; i < grid.size(); ++i) {
    check_threshold(grid[i]);
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw ArgumentError("threshold grid must be strictly increasing");
    }
  }
  auto scores = expansion_scores(anchors, index, mode);
  std::sort(scores.begin(), scores.end());
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  for (double t : grid) {
    const auto first = std::lower_bound(scores.begin(), scores.end(), t);
    out.push_back({t, static_cast<size_t>(scores.end() - first)});
  }
  return out;
}

inline nlohmann::json scored_list_json(const std::vector<ScoredId>& list) {
  auto arr = nlohmann::json::array();
  for (const auto& s : list) arr.push_back({{"id", s.id}, {"score", s.score}});
  return arr;
}

inline nlohmann::json retrieval_result_json(const RetrievalResult& r) {
  return {{"activity", r.activity},
          {"threshold", r.threshold_used},
          {"expand", expand_mode_name(r.expand)},
          {"k", r.k_anchors},
          {"anchor_count", r.anchors.size()},
          {"match_count", r.matched.size()},
          {"anchors", scored_list_json(r.anchors)},
          {"matched", scored_list_json(r.matched)}};
}

inline RetrievalResult retrieval_result_from_json(const nlohmann::json& j) {
  auto list = [](const nlohmann::json& arr) {
    std::vector<ScoredId> out;
    for (const auto& e : arr) out.push_back({e.at("id").get<std::string>(), e.at("score").get<double>()});
    return out;
  };
  try {
    RetrievalResult r;
    r.activity = j.at("activity").get<std::string>();
    r.threshold_used = j.at("threshold").get<double>();
    r.expand = parse_expand_mode(j.at("expand").get<std::string>());
    r.k_anchors = j.at("k").get<size_t>();
    r.anchors = list(j.at("anchors"));
    r.matched = list(j.at("matched"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("retrieval result: ") + e.what());
  }
}

// Human review sheet for the anchor set: rank, id, score, text.
inline std::string anchor_review_tsv(const RetrievalResult& r, const Corpus& corpus) {
  std::string out = "rank\tid\tscore\ttext\n";
  char score[32];
  for (size_t i = 0; i < r.anchors.size(); ++i) {
    const auto& a = r.anchors[i];
    std::snprintf(score, sizeof score, "%.4f", a.score);
    const Document* d = corpus.find(a.id);
    out += std::to_string(i + 1) + "\t" + a.id + "\t" + score + "\t" +
           (d ? tsv_cell(d->text_raw) : std::string()) + "\n";
  }
  return out;
}

}  // namespace shiftlens

#endif  // SHIFTLENS_RETRIEVAL_HPP_
