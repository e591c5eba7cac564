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

// Little-endian encoding helpers for the binary file formats.

#ifndef SHIFTLENS_BINARY_HPP_
#define SHIFTLENS_BINARY_HPP_

#include <bit>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "shiftlens/error.hpp"

namespace shiftlens {

namespace detail {

template <std::unsigned_integral U>
void put_le(std::string& out, U bits) {
  for (size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& out, float x) { put_le(out, std::bit_cast<uint32_t>(x)); }

class LeReader {
 public:
  LeReader(std::string_view bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

  template <std::unsigned_integral U>
  U get() {
    need(sizeof(U));
    U bits = 0;
    for (size_t i = 0; i < sizeof(U); ++i) {
      bits |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return bits;
  }

  float get_f32() { return std::bit_cast<float>(get<uint32_t>()); }

  std::string_view take(size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError(what_ + ": truncated payload");
  }
  std::string_view bytes_;
  std::string what_;
  size_t pos_ = 0;
};

}  // namespace detail

}  // namespace shiftlens

#endif  // SHIFTLENS_BINARY_HPP_
