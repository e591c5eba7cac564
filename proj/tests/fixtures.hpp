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

#ifndef SHIFTLENS_TESTS_FIXTURES_HPP_
#define SHIFTLENS_TESTS_FIXTURES_HPP_

#include <string>
#include <vector>

#include "shiftlens/embedding.hpp"
#include "shiftlens/synthetic.hpp"

namespace shiftlens::testing {

inline const std::vector<std::string>& yoga_vocabulary() {
  static const std::vector<std::string> v = {
      "yoga",    "mat",     "asana",    "pose",   "stretch", "breath",  "flow",
      "vinyasa", "namaste", "studio",   "warrior", "balance", "hatha",  "ashtanga",
      "spine",   "hips",    "salutation", "plank", "cobra",   "lotus",  "mindful",
      "posture", "inhale",  "exhale",   "bikram", "kundalini", "chakra", "savasana"};
  return v;
}

inline const std::vector<std::string>& background_vocabulary() {
  static const std::vector<std::string> v = {
      "football", "match",   "goal",    "weather", "rain",     "traffic", "train",
      "delay",    "coffee",  "lunch",   "pizza",   "election", "vote",    "government",
      "news",     "music",   "album",   "concert", "ticket",   "shopping", "sale",
      "price",    "phone",   "battery", "netflix", "series",   "episode", "holiday",
      "beach",    "flight",  "airport", "exam",    "results",  "school",  "homework",
      "tax",      "invoice", "bank",    "queue",   "bus",      "cricket", "pub",
      "burger",   "laptop",  "printer", "garden",  "weekend",  "traffic", "podcast"};
  return v;
}

// Two topics with disjoint vocabularies over one quarter.
inline SynthSpec two_topic_spec(size_t documents, double topic_weight = 1.0,
                                double background_weight = 4.0) {
  SynthSpec spec;
  spec.id_prefix = "doc";
  spec.periods = {{"2020-q3", require_date("2020-07-01"), require_date("2020-09-30"), documents}};
  spec.topics = {SynthTopic{"yoga", yoga_vocabulary(), topic_weight, {}, {}},
                 SynthTopic{"other", background_vocabulary(), background_weight, {}, {}}};
  return spec;
}

// Seed posts drawn from the topic vocabulary only.
inline SynthSpec seed_spec(size_t documents) {
  SynthSpec spec;
  spec.id_prefix = "seed";
  spec.source = Source::kRedditArchive;
  spec.periods = {{"seed", require_date("2020-01-01"), require_date("2020-06-30"), documents}};
  spec.topics = {SynthTopic{"yoga", yoga_vocabulary(), 1.0, {}, {}}};
  return spec;
}

inline EmbeddingIndex reference_index(const Corpus& corpus, size_t dim, uint64_t seed) {
  std::vector<std::pair<std::string, Vector>> entries;
  entries.reserve(corpus.size());
  for (const auto& d : corpus.documents()) {
    entries.emplace_back(d.id, embed_reference(d.text_norm, dim, seed));
  }
  return EmbeddingIndex(dim, std::move(entries));
}

inline std::vector<Vector> reference_vectors(const Corpus& corpus, size_t dim, uint64_t seed) {
  std::vector<Vector> out;
  for (const auto& d : corpus.documents()) out.push_back(embed_reference(d.text_norm, dim, seed));
  return out;
}

}  // namespace shiftlens::testing

#endif  // SHIFTLENS_TESTS_FIXTURES_HPP_
