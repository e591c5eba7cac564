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

// Calendar dates and UTC timestamps. Only the ISO-8601 subset that shows up
// in archive exports is accepted: a date, optionally followed by a time of
// day, fractional seconds and a zone designator.

#ifndef SHIFTLENS_DATE_HPP_
#define SHIFTLENS_DATE_HPP_

#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "shiftlens/error.hpp"

namespace shiftlens {

using Date = std::chrono::sys_days;
using Timestamp = std::chrono::sys_seconds;

namespace detail {

inline bool parse_fixed(std::string_view s, size_t pos, size_t width, int& out) {
  if (pos + width > s.size()) return false;
  for (size_t i = pos; i < pos + width; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + width, out);
  return ec == std::errc() && ptr == s.data() + pos + width;
}

}  // namespace detail

// Parses "YYYY-MM-DD". Returns nullopt for anything else, including
// impossible days such as 2019-02-30.
inline std::optional<Date> parse_date(std::string_view s) {
  int y = 0, m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!detail::parse_fixed(s, 0, 4, y) || !detail::parse_fixed(s, 5, 2, m) ||
      !detail::parse_fixed(s, 8, 2, d)) {
    return std::nullopt;
  }
  std::chrono::year_month_day ymd{std::chrono::year{y},
                                  std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

// Parses an ISO-8601 timestamp and converts it to UTC.
//
//   2020-07-01
//   2020-07-01T12:30
//   2020-07-01T12:30:05.123Z
//   2020-07-01 12:30:05+01:00
//
// A missing zone designator is read as UTC. Fractional seconds are
// truncated.
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
  auto date = parse_date(s.substr(0, 10));
  if (!date) return std::nullopt;
  Timestamp ts{*date};
  if (s.size() == 10) return ts;
  if (s[10] != 'T' && s[10] != ' ') return std::nullopt;

  size_t pos = 11;
  int hh = 0, mm = 0, ss = 0;
  if (!detail::parse_fixed(s, pos, 2, hh) || pos + 2 >= s.size() ||
      s[pos + 2] != ':' || !detail::parse_fixed(s, pos + 3, 2, mm)) {
    return std::nullopt;
  }
  pos += 5;
  if (pos < s.size() && s[pos] == ':') {
    if (!detail::parse_fixed(s, pos + 1, 2, ss)) return std::nullopt;
    pos += 3;
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
      ++pos;
      size_t digits = 0;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos, ++digits;
      if (digits == 0) return std::nullopt;
    }
  }
  // 24:00:00 is not accepted; leap seconds are not representable.
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
  ts += std::chrono::hours{hh} + std::chrono::minutes{mm} +
        std::chrono::seconds{ss};

  if (pos == s.size()) return ts;
  if (s[pos] == 'Z' && pos + 1 == s.size()) return ts;
  if (s[pos] != '+' && s[pos] != '-') return std::nullopt;
  const int sign = s[pos] == '+' ? 1 : -1;
  int oh = 0, om = 0;
  if (!detail::parse_fixed(s, pos + 1, 2, oh)) return std::nullopt;
  size_t rest = pos + 3;
  if (rest < s.size() && s[rest] == ':') ++rest;
  if (!detail::parse_fixed(s, rest, 2, om) || rest + 2 != s.size()) {
    return std::nullopt;
  }
  if (oh > 23 || om > 59) return std::nullopt;
  // Local time = UTC + offset.
  ts -= sign * (std::chrono::hours{oh} + std::chrono::minutes{om});
  return ts;
}

inline Date date_of(Timestamp ts) {
  return std::chrono::floor<std::chrono::days>(ts);
}

inline std::string format_date(Date d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::string format_timestamp(Timestamp ts) {
  const Date d = date_of(ts);
  std::chrono::hh_mm_ss hms{ts - d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ",
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return format_date(d) + buf;
}

// "YYYY-MM" of the timestamp's UTC date.
inline std::string month_label(Date d) { return format_date(d).substr(0, 7); }

// Throws ArgumentError on a malformed date; used by config and CLI parsing.
inline Date require_date(std::string_view s) {
  auto d = parse_date(s);
  if (!d) throw ArgumentError("invalid date '" + std::string(s) + "', expected YYYY-MM-DD");
  return *d;
}

// Inclusive day count of [start, end].
inline long days_inclusive(Date start, Date end) {
  return (end - start).count() + 1;
}

}  // namespace shiftlens

#endif  // SHIFTLENS_DATE_HPP_
