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

#ifndef SHIFTLENS_IO_HPP_
#define SHIFTLENS_IO_HPP_

#include <openssl/evp.h>
#include <zlib.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "shiftlens/error.hpp"

namespace shiftlens {

namespace fs = std::filesystem;

inline bool has_gzip_extension(const fs::path& path) {
  return path.extension() == ".gz";
}

// Calls `fn` for every line of the file, without the trailing newline (and
// without a trailing '\r'). Files ending in ".gz" are decompressed.
inline void for_each_line(const fs::path& path,
                          const std::function<void(std::string_view)>& fn) {
  if (has_gzip_extension(path)) {
    gzFile gz = gzopen(path.c_str(), "rb");
    if (gz == nullptr) throw IoError("cannot open " + path.string());
    std::string line;
    std::array<char, 1 << 16> buf;
    int n = 0;
    while ((n = gzread(gz, buf.data(), static_cast<unsigned>(buf.size()))) > 0) {
      for (int i = 0; i < n; ++i) {
        if (buf[i] == '\n') {
          if (!line.empty() && line.back() == '\r') line.pop_back();
          fn(line);
          line.clear();
        } else {
          line.push_back(buf[i]);
        }
      }
    }
    int err = 0;
    const char* msg = gzerror(gz, &err);
    const bool failed = n < 0 || (err != Z_OK && err != Z_STREAM_END);
    const std::string what = failed ? msg : "";
    gzclose(gz);
    if (failed) throw IoError("read error in " + path.string() + ": " + what);
    if (!line.empty()) {
      if (line.back() == '\r') line.pop_back();
      fn(line);
    }
    return;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(line);
  }
  if (in.bad()) throw IoError("read error in " + path.string());
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read error in " + path.string());
  return ss.str();
}

// Writes through a temporary sibling and renames it into place, so readers
// never observe a partially written file.
inline void write_file_atomic(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write error in " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
  }
}

inline std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xf]);
  }
  return out;
}

inline std::string sha256_file(const fs::path& path) {
  return sha256_hex(read_file(path));
}

// Flattens tabs and newlines so free text fits in one TSV cell.
inline std::string tsv_cell(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

// Shortest round-trip decimal form, for CSV cells.
inline std::string format_double(double x) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

}  // namespace shiftlens

#endif  // SHIFTLENS_IO_HPP_
