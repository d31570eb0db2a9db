// Copyright 2026 The Robsub Authors.
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

#ifndef ROBSUB_ERROR_H_
#define ROBSUB_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace robsub {

// Every failure mode carries one of these codes. The CLI maps them one-to-one
// onto process exit statuses (see ExitStatus).
enum class ErrorCode {
  kConfigError,
  kParseError,
  kNonNumericCell,
  kDuplicateIds,
  kMissingResponse,
  kShapeMismatch,
  kSingularGram,
  kDegenerateRemoval,
  kDegenerateSwap,
  kDegenerateLeverage,
  kDriftExceeded,
  kInitFailed,
  kInsufficientDoF,
  kZeroVariance,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// Exit status reported by the command-line front-end for `code`. Always >= 2;
// 0 is success and 1 is reserved for unexpected failures.
int ExitStatus(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace robsub

#endif  // ROBSUB_ERROR_H_
