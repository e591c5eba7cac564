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

#ifndef SHIFTLENS_MODALITY_HPP_
#define SHIFTLENS_MODALITY_HPP_

#include <string>
#include <string_view>

#include "shiftlens/error.hpp"

namespace shiftlens {

enum class Modality { kOffline, kOnline };

inline std::string_view modality_name(Modality m) {
  return m == Modality::kOffline ? "offline" : "online";
}

inline Modality parse_modality(std::string_view s) {
  if (s == "offline") return Modality::kOffline;
  if (s == "online") return Modality::kOnline;
  throw ArgumentError("unknown modality '" + std::string(s) + "' (offline|online)");
}

}  // namespace shiftlens

#endif  // SHIFTLENS_MODALITY_HPP_
