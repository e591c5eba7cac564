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

#ifndef SHIFTLENS_ERROR_HPP_
#define SHIFTLENS_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace shiftlens {

// Caller passed a value outside an operation's precondition.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A file or record does not match its declared format.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A stream or file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration failed validation before any work was done.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A statistic is undefined because the sample has zero spread but a
// nonzero mean difference.
class DegenerateVarianceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace shiftlens

#endif  // SHIFTLENS_ERROR_HPP_
