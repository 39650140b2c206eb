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

#ifndef MTL_ERROR_H_
#define MTL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mtl {

enum class ErrorKind {
  kInvalidProblem,
  kSingularSystem,
  kSplitting,
  kNumerical,
  kIndex,
  kInvalidSchedule,
  kInvalidAction,
  kInvalidConfig,
  kSearchBudget,
  kDegenerateRange,
  kDegenerateGap,
  kMismatchedTasks,
  kEmptyInput,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

// Every failure raised by the library carries a kind so the CLI can emit a
// machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mtl

#endif  // MTL_ERROR_H_
