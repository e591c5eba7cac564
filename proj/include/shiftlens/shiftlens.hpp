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

#ifndef SHIFTLENS_SHIFTLENS_HPP_
#define SHIFTLENS_SHIFTLENS_HPP_

#include "shiftlens/corpus.hpp"
#include "shiftlens/date.hpp"
#include "shiftlens/embedding.hpp"
#include "shiftlens/error.hpp"
#include "shiftlens/io.hpp"
#include "shiftlens/lm.hpp"
#include "shiftlens/modality.hpp"
#include "shiftlens/pipeline.hpp"
#include "shiftlens/report.hpp"
#include "shiftlens/retrieval.hpp"
#include "shiftlens/shift.hpp"
#include "shiftlens/stats.hpp"
#include "shiftlens/survey.hpp"
#include "shiftlens/synthetic.hpp"
#include "shiftlens/text.hpp"

#endif  // SHIFTLENS_SHIFTLENS_HPP_
