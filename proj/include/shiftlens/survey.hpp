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

// Questionnaire tables and the net engagement-change score.
//
// Each table answers "are you doing this activity more, less or the same
// as before?" for one month, activity and modality. Net change is the
// percentage saying more minus the percentage saying less.

#ifndef SHIFTLENS_SURVEY_HPP_
#define SHIFTLENS_SURVEY_HPP_

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "shiftlens/error.hpp"
#include "shiftlens/io.hpp"
#include "shiftlens/modality.hpp"

namespace shiftlens {

namespace detail {

// Splits one CSV record; double-quoted fields may contain commas and ""
// escapes. Returns nullopt for an unterminated quote.
inline std::optional<std::vector<std::string>> split_csv(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c != '"') {
        out.back() += c;
      } else if (i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else {
        quoted = false;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) return std::nullopt;
  return out;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return "";
  return std::string(s.substr(b, s.find_last_not_of(" \t") - b + 1));
}

inline std::optional<int64_t> parse_int(std::string_view s) {
  int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline void read_csv_lines(std::istream& in, const std::function<void(std::string_view)>& fn) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(line);
  }
}

}  // namespace detail

struct SurveyTable {
  std::string month;
  std::string activity;
  Modality modality = Modality::kOffline;
  uint64_t more = 0;
  uint64_t less = 0;
  uint64_t same = 0;
  uint64_t not_regular = 0;
  uint64_t respondents = 0;

  // "Net: does this regularly".
  uint64_t regular() const { return more + less + same; }
};

struct SurveyRejection {
  size_t line = 0;     // 1-based, header is line 1
  std::string reason;  // machine-readable code
  std::string detail;
};

struct SurveyLoadReport {
  size_t total_rows = 0;
  std::vector<SurveyRejection> rejected;

  size_t accepted() const { return total_rows - rejected.size(); }

  std::map<std::string, size_t> rejected_by_reason() const {
    std::map<std::string, size_t> m;
    for (const auto& r : rejected) ++m[r.reason];
    return m;
  }
};

struct SurveyLoadResult {
  std::vector<SurveyTable> tables;
  SurveyLoadReport report;
};

inline constexpr std::string_view kSurveyHeader =
    "month,activity,modality,more,less,same,not_regular,respondents";

// Every data row is either accepted or rejected with one of:
// malformed_row, unknown_modality, negative_tally, nonpositive_respondents,
// tally_sum_exceeds_respondents, duplicate_table. A bad header is a format
// error for the whole file.
inline SurveyLoadResult load_survey(std::istream& in, const std::string& where = "survey") {
  SurveyLoadResult out;
  size_t line_no = 0;
  bool header_seen = false;
  std::set<std::tuple<std::string, std::string, Modality>> seen;
  detail::read_csv_lines(in, [&](std::string_view line) {
    ++line_no;
    if (!header_seen) {
      if (detail::trim(line) != kSurveyHeader) {
        throw FormatError(where + ": expected header '" + std::string(kSurveyHeader) + "'");
      }
      header_seen = true;
      return;
    }
    if (detail::trim(line).empty()) return;
    ++out.report.total_rows;
    auto reject = [&](std::string reason, std::string detail) {
      out.report.rejected.push_back({line_no, std::move(reason), std::move(detail)});
    };
    auto cells = detail::split_csv(line);
    if (!cells || cells->size() != 8) {
      reject("malformed_row", "expected 8 fields");
      return;
    }
    for (auto& c : *cells) c = detail::trim(c);
    SurveyTable t;
    t.month = (*cells)[0];
    t.activity = (*cells)[1];
    if (t.month.empty() || t.activity.empty()) {
      reject("malformed_row", "empty month or activity");
      return;
    }
    const std::string& mod = (*cells)[2];
    if (mod == "offline") {
      t.modality = Modality::kOffline;
    } else if (mod == "online") {
      t.modality = Modality::kOnline;
    } else {
      reject("unknown_modality", mod);
      return;
    }
    int64_t v[5];
    for (int i = 0; i < 5; ++i) {
      auto n = detail::parse_int((*cells)[size_t(3 + i)]);
      if (!n) {
        reject("malformed_row", "non-integer field '" + (*cells)[size_t(3 + i)] + "'");
        return;
      }
      v[i] = *n;
    }
    for (int i = 0; i < 4; ++i) {
      if (v[i] < 0) {
        reject("negative_tally", std::to_string(v[i]));
        return;
      }
    }
    if (v[4] <= 0) {
      reject("nonpositive_respondents", std::to_string(v[4]));
      return;
    }
    t.more = uint64_t(v[0]);
    t.less = uint64_t(v[1]);
    t.same = uint64_t(v[2]);
    t.not_regular = uint64_t(v[3]);
    t.respondents = uint64_t(v[4]);
    if (t.more + t.less + t.same + t.not_regular > t.respondents) {
      reject("tally_sum_exceeds_respondents",
             std::to_string(t.more + t.less + t.same + t.not_regular) + " > " +
                 std::to_string(t.respondents));
      return;
    }
    if (!seen.emplace(t.month, t.activity, t.modality).second) {
      reject("duplicate_table", t.month + "/" + t.activity + "/" + mod);
      return;
    }
    out.tables.push_back(std::move(t));
  });
  if (!header_seen) throw FormatError(where + ": empty survey file");
  return out;
}

inline SurveyLoadResult load_survey(const fs::path& path) {
  std::istringstream in(read_file(path));
  return load_survey(in, path.string());
}

enum class SurveyDenominator { kAllRespondents, kRegularDoers };

inline std::string_view denominator_name(SurveyDenominator d) {
  return d == SurveyDenominator::kAllRespondents ? "all_respondents" : "regular_doers";
}

struct NetChange {
  std::string month;
  std::string activity;
  Modality modality = Modality::kOffline;
  double pct_more = 0;
  double pct_less = 0;
  double net = 0;  // percentage points
  uint64_t net_regular = 0;
  SurveyDenominator denominator = SurveyDenominator::kAllRespondents;
};

inline NetChange net_engagement_change(const SurveyTable& t,
                                       SurveyDenominator denom = SurveyDenominator::kAllRespondents) {
  if (t.respondents == 0) throw ArgumentError("survey table has no respondents");
  const uint64_t base = denom == SurveyDenominator::kAllRespondents ? t.respondents : t.regular();
  if (base == 0) throw ArgumentError("survey table has no regular doers");
  NetChange n;
  n.month = t.month;
  n.activity = t.activity;
  n.modality = t.modality;
  n.pct_more = 100.0 * static_cast<double>(t.more) / static_cast<double>(base);
  n.pct_less = 100.0 * static_cast<double>(t.less) / static_cast<double>(base);
  n.net = n.pct_more - n.pct_less;
  n.net_regular = t.regular();
  n.denominator = denom;
  return n;
}

inline nlohmann::json net_change_json(const NetChange& n) {
  return {{"month", n.month},
          {"activity", n.activity},
          {"modality", std::string(modality_name(n.modality))},
          {"pct_more", n.pct_more},
          {"pct_less", n.pct_less},
          {"net", n.net},
          {"net_regular", n.net_regular},
          {"denominator", std::string(denominator_name(n.denominator))},
          {"weighting", "unweighted"}};
}

inline nlohmann::json survey_load_report_json(const SurveyLoadReport& r) {
  auto rejected = nlohmann::json::array();
  for (const auto& x : r.rejected) {
    rejected.push_back({{"line", x.line}, {"reason", x.reason}, {"detail", x.detail}});
  }
  return {{"total_rows", r.total_rows}, {"accepted", r.accepted()}, {"rejected", rejected}};
}

// ---------------------------------------------------------------------------
// Respondent demographics, from rows of "age,gender,region".

inline const std::vector<std::string>& age_bands() {
  static const std::vector<std::string> b = {"<18",   "18-24", "25-34", "35-44",
                                             "45-54", "55-64", "65+"};
  return b;
}

inline std::string age_band(int64_t age) {
  if (age < 18) return "<18";
  if (age < 25) return "18-24";
  if (age < 35) return "25-34";
  if (age < 45) return "35-44";
  if (age < 55) return "45-54";
  if (age < 65) return "55-64";
  return "65+";
}

struct DemographicSummary {
  size_t respondents = 0;
  std::optional<double> mean_age;
  std::map<std::string, size_t> by_age_band;
  std::map<std::string, size_t> by_gender;
  std::map<std::string, double> gender_pct;
  std::map<std::string, size_t> by_region;
  std::vector<SurveyRejection> rejected;
};

inline DemographicSummary summarize_demographics(std::istream& in,
                                                 const std::string& where = "respondents") {
  DemographicSummary s;
  size_t line_no = 0;
  bool header_seen = false;
  int64_t age_sum = 0;
  detail::read_csv_lines(in, [&](std::string_view line) {
    ++line_no;
    if (!header_seen) {
      if (detail::trim(line) != "age,gender,region") {
        throw FormatError(where + ": expected header 'age,gender,region'");
      }
      header_seen = true;
      return;
    }
    if (detail::trim(line).empty()) return;
    auto cells = detail::split_csv(line);
    if (!cells || cells->size() != 3) {
      s.rejected.push_back({line_no, "malformed_row", "expected 3 fields"});
      return;
    }
    auto age = detail::parse_int(detail::trim((*cells)[0]));
    if (!age || *age < 0 || *age > 150) {
      s.rejected.push_back({line_no, "non_numeric_age", (*cells)[0]});
      return;
    }
    std::string gender = detail::trim((*cells)[1]);
    for (char& c : gender) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    ++s.respondents;
    age_sum += *age;
    ++s.by_age_band[age_band(*age)];
    ++s.by_gender[gender];
    ++s.by_region[detail::trim((*cells)[2])];
  });
  if (s.respondents > 0) {
    s.mean_age = static_cast<double>(age_sum) / static_cast<double>(s.respondents);
    for (const auto& [g, n] : s.by_gender) {
      s.gender_pct[g] = 100.0 * static_cast<double>(n) / static_cast<double>(s.respondents);
    }
  }
  return s;
}

inline DemographicSummary summarize_demographics(const fs::path& path) {
  std::istringstream in(read_file(path));
  return summarize_demographics(in, path.string());
}

inline nlohmann::json demographics_json(const DemographicSummary& s) {
  nlohmann::json bands = nlohmann::json::object();
  for (const auto& b : age_bands()) {
    auto it = s.by_age_band.find(b);
    bands[b] = it == s.by_age_band.end() ? 0 : it->second;
  }
  return {{"respondents", s.respondents},
          {"mean_age", s.mean_age ? nlohmann::json(*s.mean_age) : nlohmann::json(nullptr)},
          {"age_bands", bands},
          {"gender", s.by_gender},
          {"gender_pct", s.gender_pct},
          {"region", s.by_region},
          {"rejected", s.rejected.size()}};
}

}  // namespace shiftlens

#endif  // SHIFTLENS_SURVEY_HPP_
