// Copyright 2026 The mtl Authors. All rights reserved.
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

#include "mtl/error.h"

namespace mtl {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidProblem: return "invalid_problem";
    case ErrorKind::kSingularSystem: return "singular_system";
    case ErrorKind::kSplitting: return "splitting";
    case ErrorKind::kNumerical: return "numerical";
    case ErrorKind::kIndex: return "index";
    case ErrorKind::kInvalidSchedule: return "invalid_schedule";
    case ErrorKind::kInvalidAction: return "invalid_action";
    case ErrorKind::kInvalidConfig: return "invalid_config";
    case ErrorKind::kSearchBudget: return "search_budget";
    case ErrorKind::kDegenerateRange: return "degenerate_range";
    case ErrorKind::kDegenerateGap: return "degenerate_gap";
    case ErrorKind::kMismatchedTasks: return "mismatched_tasks";
    case ErrorKind::kEmptyInput: return "empty_input";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace mtl
