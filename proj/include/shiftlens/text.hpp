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

// Text normalization and tokenization for short social-media documents.
//
// normalize_text() lowercases ASCII letters, masks URLs and @-mentions with
// the sentinels kUrlToken / kUserToken and collapses whitespace. tokenize()
// splits normalized text on whitespace and detaches ASCII punctuation, except
// that '#' stays part of a token ("#yoga") and an apostrophe between two word
// characters stays inside the word ("don't").

#ifndef SHIFTLENS_TEXT_HPP_
#define SHIFTLENS_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace shiftlens {

inline constexpr std::string_view kUserToken = "⟨user⟩";
inline constexpr std::string_view kUrlToken = "⟨url⟩";

using TokenSequence = std::vector<std::string>;

namespace detail {

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline bool is_handle_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

inline bool is_ascii_punct(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
         (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

inline bool starts_with_at(std::string_view s, size_t pos, std::string_view p) {
  return s.substr(pos, p.size()) == p;
}

inline bool is_sentinel_at(std::string_view s, size_t pos) {
  return starts_with_at(s, pos, kUserToken) || starts_with_at(s, pos, kUrlToken);
}

// Characters that are peeled off the end of a URL and kept as text.
inline bool is_url_trailer(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' ||
         c == '?' || c == ')' || c == ']' || c == '}' || c == '"' || c == '\'';
}

inline size_t url_prefix_length(std::string_view s, size_t pos, char prev) {
  if (starts_with_at(s, pos, "https://")) return 8;
  if (starts_with_at(s, pos, "http://")) return 7;
  if (starts_with_at(s, pos, "www.") && !is_handle_char(prev)) return 4;
  return 0;
}

}  // namespace detail

inline std::string normalize_text(std::string_view raw) {
  std::string lower(raw);
  for (char& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }

  // Mask in one left-to-right pass. Boundary checks look at the output
  // written so far, which is what a second pass would see.
  std::string masked;
  masked.reserve(lower.size());
  size_t i = 0;
  while (i < lower.size()) {
    const char prev = masked.empty() ? ' ' : masked.back();
    if (size_t plen = detail::url_prefix_length(lower, i, prev); plen > 0) {
      size_t end = i + plen;
      while (end < lower.size() && !detail::is_ascii_space(lower[end])) ++end;
      size_t keep = end;
      while (keep > i + plen && detail::is_url_trailer(lower[keep - 1])) --keep;
      masked += kUrlToken;
      masked.append(lower, keep, end - keep);
      i = end;
      continue;
    }
    if (lower[i] == '@' && !detail::is_handle_char(prev) &&
        i + 1 < lower.size() && detail::is_handle_char(lower[i + 1])) {
      size_t end = i + 1;
      while (end < lower.size() && detail::is_handle_char(lower[end])) ++end;
      masked += kUserToken;
      i = end;
      continue;
    }
    masked.push_back(lower[i]);
    ++i;
  }

  std::string out;
  out.reserve(masked.size());
  bool pending_space = false;
  for (char c : masked) {
    if (detail::is_ascii_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

inline TokenSequence tokenize(std::string_view norm) {
  TokenSequence tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };
  auto is_word_byte_at = [&](size_t pos) {
    if (pos >= norm.size()) return false;
    const char c = norm[pos];
    if (detail::is_ascii_space(c) || c == '\'') return false;
    if (detail::is_ascii_punct(c) && c != '#') return false;
    return !detail::is_sentinel_at(norm, pos);
  };

  size_t i = 0;
  while (i < norm.size()) {
    const char c = norm[i];
    if (detail::is_ascii_space(c)) {
      flush();
      ++i;
    } else if (detail::is_sentinel_at(norm, i)) {
      flush();
      const std::string_view s =
          detail::starts_with_at(norm, i, kUserToken) ? kUserToken : kUrlToken;
      tokens.emplace_back(s);
      i += s.size();
    } else if (c == '\'') {
      if (!cur.empty() && is_word_byte_at(i + 1)) {
        cur.push_back(c);
      } else {
        flush();
        tokens.emplace_back(1, c);
      }
      ++i;
    } else if (detail::is_ascii_punct(c) && c != '#') {
      flush();
      tokens.emplace_back(1, c);
      ++i;
    } else {
      cur.push_back(c);
      ++i;
    }
  }
  flush();
  return tokens;
}

inline std::string join_tokens(const TokenSequence& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

// True for tokens that carry lexical content: not a sentinel and not a
// lone punctuation mark.
inline bool is_lexical_token(std::string_view tok) {
  if (tok == kUserToken || tok == kUrlToken) return false;
  for (char c : tok) {
    if (!detail::is_ascii_punct(c)) return true;
  }
  return false;
}

}  // namespace shiftlens

#endif  // SHIFTLENS_TEXT_HPP_
