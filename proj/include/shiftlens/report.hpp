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

// Plot-ready and word-cloud exports.

#ifndef SHIFTLENS_REPORT_HPP_
#define SHIFTLENS_REPORT_HPP_

#include <algorithm>
#include <string>

#include "shiftlens/corpus.hpp"
#include "shiftlens/date.hpp"
#include "shiftlens/error.hpp"
#include "shiftlens/io.hpp"
#include "shiftlens/shift.hpp"

namespace shiftlens {

// token,weight rows for the corpus-i cloud: weight is z clipped at zero,
// so tokens representative of corpus j are left out. At most n rows, in
// report order (weights non-increasing). For the corpus-j cloud, run the
// report with the corpora swapped.
inline std::string emit_wordcloud_weights(const LexicalShiftReport& report, size_t n = 100) {
  if (n < 1) throw ArgumentError("word cloud needs n >= 1");
  std::string out = "token,weight\n";
  size_t rows = 0;
  for (const auto& e : report.entries) {
    if (rows == n || !(e.z > 0)) break;
    out += e.token + "," + format_double(e.z) + "\n";
    ++rows;
  }
  return out;
}

// day_offset,date_pre,count_pre,date_during,count_during
inline std::string emit_plot_data(const FrequencySeries& pre, const FrequencySeries& during) {
  if (pre.day_counts.size() != during.day_counts.size()) {
    throw ArgumentError("plot series are not aligned (" + std::to_string(pre.day_counts.size()) +
                        " vs " + std::to_string(during.day_counts.size()) + " days)");
  }
  std::string out = "day_offset,date_pre,count_pre,date_during,count_during\n";
  for (size_t i = 0; i < pre.day_counts.size(); ++i) {
    const auto& a = pre.day_counts[i];
    const auto& b = during.day_counts[i];
    out += std::to_string(i) + "," + format_date(a.date) + "," + std::to_string(a.count) + "," +
           format_date(b.date) + "," + std::to_string(b.count) + "\n";
  }
  return out;
}

}  // namespace shiftlens

#endif  // SHIFTLENS_REPORT_HPP_
