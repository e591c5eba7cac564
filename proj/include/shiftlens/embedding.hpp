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

#ifndef SHIFTLENS_EMBEDDING_HPP_
#define SHIFTLENS_EMBEDDING_HPP_

#include <algorithm>
#include <bit>
#include <concepts>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "shiftlens/binary.hpp"
#include "shiftlens/error.hpp"
#include "shiftlens/io.hpp"

namespace shiftlens {

using Vector = std::vector<float>;

// Stored entries are rescaled when their norm is further than this from 1.
inline constexpr double kUnitNormTolerance = 1e-5;

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded FNV-1a over bytes, finished with a splitmix64 avalanche.
inline uint64_t stable_hash(std::string_view bytes, uint64_t seed) {
  uint64_t h = 0xcbf29ce484222325ULL ^ splitmix64(seed);
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

// Splits UTF-8 into characters. A byte that does not start a well-formed
// sequence is its own character.
inline std::vector<std::string_view> utf8_chars(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    size_t len = 1;
    if (c >= 0xC2 && c <= 0xDF) len = 2;
    else if (c >= 0xE0 && c <= 0xEF) len = 3;
    else if (c >= 0xF0 && c <= 0xF4) len = 4;
    if (len > 1) {
      if (i + len > s.size()) {
        len = 1;
      } else {
        for (size_t k = 1; k < len; ++k) {
          if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) {
            len = 1;
            break;
          }
        }
      }
    }
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

struct CosineParts {
  double dot = 0, norm_a = 0, norm_b = 0;
};

inline double squared_norm(std::span<const float> v) {
  double n = 0;
  for (float x : v) n += static_cast<double>(x) * x;
  return n;
}

inline double dot(std::span<const float> a, std::span<const float> b) {
  double d = 0;
  for (size_t i = 0; i < a.size(); ++i) d += static_cast<double>(a[i]) * b[i];
  return d;
}

inline double cosine_from_parts(double dot, double sq_a, double sq_b) {
  const double c = dot / (std::sqrt(sq_a) * std::sqrt(sq_b));
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace detail

// Hashed bag of character trigrams, L2-normalized. Each trigram adds +1 or
// -1 to one coordinate; coordinate and sign both come from a seeded hash
// that does not depend on the platform. Text with fewer than three
// characters (or whose contributions cancel exactly) maps to e_0.
inline Vector embed_reference(std::string_view text_norm, size_t dim, uint64_t seed) {
  if (dim < 8) throw ArgumentError("reference embedding dim must be >= 8");
  std::vector<double> acc(dim, 0.0);
  const auto chars = detail::utf8_chars(text_norm);
  for (size_t i = 0; i + 2 < chars.size(); ++i) {
    const char* begin = chars[i].data();
    const char* end = chars[i + 2].data() + chars[i + 2].size();
    const uint64_t h = detail::stable_hash(std::string_view(begin, static_cast<size_t>(end - begin)), seed);
    acc[h % dim] += (h >> 63) ? -1.0 : 1.0;
  }
  double sq = 0;
  for (double x : acc) sq += x * x;
  Vector v(dim, 0.0f);
  if (sq == 0) {
    v[0] = 1.0f;
    return v;
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (size_t i = 0; i < dim; ++i) v[i] = static_cast<float>(acc[i] * inv);
  return v;
}

inline double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw ArgumentError("cosine: dimension mismatch " + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
  }
  const double sq_a = detail::squared_norm(a);
  const double sq_b = detail::squared_norm(b);
  if (sq_a == 0 || sq_b == 0) throw ArgumentError("cosine: zero vector");
  return detail::cosine_from_parts(detail::dot(a, b), sq_a, sq_b);
}

// Component-wise mean, not re-normalized.
inline Vector centroid(std::span<const Vector> vectors) {
  if (vectors.empty()) throw ArgumentError("centroid of an empty vector list");
  const size_t dim = vectors.front().size();
  std::vector<double> acc(dim, 0.0);
  for (const auto& v : vectors) {
    if (v.size() != dim) throw ArgumentError("centroid: dimension mismatch");
    for (size_t i = 0; i < dim; ++i) acc[i] += v[i];
  }
  Vector out(dim);
  const double n = static_cast<double>(vectors.size());
  for (size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(acc[i] / n);
  return out;
}

// Id-aligned, unit-norm vectors. Immutable once constructed.
class EmbeddingIndex {
 public:
  EmbeddingIndex() = default;

  // Vectors whose norm is within kUnitNormTolerance of 1 are stored bit for
  // bit; others are rescaled. Zero, non-finite or wrongly sized vectors and
  // duplicate ids are rejected.
  EmbeddingIndex(size_t dim, std::vector<std::pair<std::string, Vector>> entries) : dim_(dim) {
    if (dim == 0) throw ArgumentError("embedding index dim must be positive");
    ids_.reserve(entries.size());
    data_.reserve(entries.size() * dim);
    sq_norms_.reserve(entries.size());
    for (auto& [id, v] : entries) {
      if (v.size() != dim) {
        throw ArgumentError("vector for '" + id + "' has dim " + std::to_string(v.size()) +
                            ", expected " + std::to_string(dim));
      }
      for (float x : v) {
        if (!std::isfinite(x)) throw ArgumentError("non-finite component in vector '" + id + "'");
      }
      const double sq = detail::squared_norm(v);
      if (sq == 0) throw ArgumentError("zero vector for '" + id + "'");
      const double norm = std::sqrt(sq);
      if (std::abs(norm - 1.0) > kUnitNormTolerance) {
        for (float& x : v) x = static_cast<float>(x / norm);
      }
      if (!positions_.emplace(id, ids_.size()).second) {
        throw ArgumentError("duplicate id '" + id + "' in embedding index");
      }
      ids_.push_back(std::move(id));
      data_.insert(data_.end(), v.begin(), v.end());
      sq_norms_.push_back(detail::squared_norm(vector(ids_.size() - 1)));
    }
  }

  size_t dim() const { return dim_; }
  size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::string& id(size_t i) const { return ids_[i]; }
  const std::vector<std::string>& ids() const { return ids_; }

  std::span<const float> vector(size_t i) const {
    return std::span<const float>(data_).subspan(i * dim_, dim_);
  }

  std::optional<size_t> find(std::string_view id) const {
    auto it = positions_.find(std::string(id));
    if (it == positions_.end()) return std::nullopt;
    return it->second;
  }

  // Cosine of `query` against every entry, in index order. Bitwise equal to
  // calling cosine_similarity() per entry.
  std::vector<double> scores(std::span<const float> query) const {
    if (query.size() != dim_) throw ArgumentError("query dimension mismatch");
    const double sq_q = detail::squared_norm(query);
    if (sq_q == 0) throw ArgumentError("cosine: zero vector");
    std::vector<double> out(size());
    for (size_t i = 0; i < size(); ++i) {
      out[i] = detail::cosine_from_parts(detail::dot(query, vector(i)), sq_q, sq_norms_[i]);
    }
    return out;
  }

 private:
  size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::vector<double> sq_norms_;
  std::unordered_map<std::string, size_t> positions_;
};

struct ScoredId {
  std::string id;
  double score = 0;

  bool operator==(const ScoredId&) const = default;
};

// Descending score, then ascending id.
inline bool ranks_before(const ScoredId& a, const ScoredId& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

inline std::vector<ScoredId> rank_scores(const EmbeddingIndex& index,
                                         const std::vector<double>& scores, size_t k) {
  std::vector<ScoredId> all;
  all.reserve(index.size());
  for (size_t i = 0; i < index.size(); ++i) all.push_back({index.id(i), scores[i]});
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<long>(k), all.end(), ranks_before);
  all.resize(k);
  return all;
}

inline std::vector<ScoredId> top_k_similar(std::span<const float> query,
                                           const EmbeddingIndex& index, size_t k) {
  if (k == 0) throw ArgumentError("top_k: k must be >= 1");
  if (index.empty()) throw ArgumentError("top_k: empty index");
  return rank_scores(index, index.scores(query), k);
}

// ---------------------------------------------------------------------------
// SLVX vector files. Little-endian throughout:
//
//   "SLVX" | u32 version (1) | u32 dim | u64 count
//   count x ( u16 id_len | id bytes | dim x f32 )

inline constexpr char kVectorMagic[4] = {'S', 'L', 'V', 'X'};
inline constexpr uint32_t kVectorVersion = 1;

inline std::string encode_vectors(const EmbeddingIndex& index) {
  std::string out(kVectorMagic, 4);
  detail::put_le<uint32_t>(out, kVectorVersion);
  detail::put_le<uint32_t>(out, static_cast<uint32_t>(index.dim()));
  detail::put_le<uint64_t>(out, index.size());
  for (size_t i = 0; i < index.size(); ++i) {
    const std::string& id = index.id(i);
    if (id.size() > 0xffff) throw ArgumentError("id longer than 65535 bytes: " + id.substr(0, 32));
    detail::put_le<uint16_t>(out, static_cast<uint16_t>(id.size()));
    out += id;
    for (float x : index.vector(i)) detail::put_f32(out, x);
  }
  return out;
}

// Throws FormatError on any defect; never returns a partial index.
inline EmbeddingIndex decode_vectors(std::string_view bytes, const std::string& what = "vectors") {
  detail::LeReader in(bytes, what);
  if (in.take(4) != std::string_view(kVectorMagic, 4)) throw FormatError(what + ": bad magic");
  const auto version = in.get<uint32_t>();
  if (version != kVectorVersion) {
    throw FormatError(what + ": unsupported version " + std::to_string(version));
  }
  const auto dim = in.get<uint32_t>();
  if (dim == 0) throw FormatError(what + ": dim is 0");
  const auto count = in.get<uint64_t>();
  // Smallest possible entry is a 2-byte length plus the floats.
  if (count > in.remaining() / (2 + 4ULL * dim)) throw FormatError(what + ": truncated payload");
  std::vector<std::pair<std::string, Vector>> entries;
  entries.reserve(count);
  for (uint64_t n = 0; n < count; ++n) {
    const auto len = in.get<uint16_t>();
    std::string id(in.take(len));
    Vector v(dim);
    for (auto& x : v) x = in.get_f32();
    entries.emplace_back(std::move(id), std::move(v));
  }
  if (in.remaining() != 0) throw FormatError(what + ": trailing bytes after last entry");
  try {
    return EmbeddingIndex(dim, std::move(entries));
  } catch (const ArgumentError& e) {
    throw FormatError(what + ": " + e.what());
  }
}

inline void write_vectors(const EmbeddingIndex& index, const fs::path& path) {
  write_file_atomic(path, encode_vectors(index));
}

inline EmbeddingIndex read_vectors(const fs::path& path) {
  return decode_vectors(read_file(path), path.string());
}

}  // namespace shiftlens

#endif  // SHIFTLENS_EMBEDDING_HPP_
