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

#include "robsub/error.h"

namespace robsub {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNonNumericCell: return "NonNumericCell";
    case ErrorCode::kDuplicateIds: return "DuplicateIds";
    case ErrorCode::kMissingResponse: return "MissingResponse";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kSingularGram: return "SingularGram";
    case ErrorCode::kDegenerateRemoval: return "DegenerateRemoval";
    case ErrorCode::kDegenerateSwap: return "DegenerateSwap";
    case ErrorCode::kDegenerateLeverage: return "DegenerateLeverage";
    case ErrorCode::kDriftExceeded: return "DriftExceeded";
    case ErrorCode::kInitFailed: return "InitFailed";
    case ErrorCode::kInsufficientDoF: return "InsufficientDoF";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

int ExitStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError: return 2;
    case ErrorCode::kParseError: return 3;
    case ErrorCode::kNonNumericCell: return 4;
    case ErrorCode::kDuplicateIds: return 5;
    case ErrorCode::kMissingResponse: return 6;
    case ErrorCode::kShapeMismatch: return 7;
    case ErrorCode::kSingularGram: return 8;
    case ErrorCode::kDegenerateRemoval: return 9;
    case ErrorCode::kDegenerateSwap: return 10;
    case ErrorCode::kDegenerateLeverage: return 11;
    case ErrorCode::kDriftExceeded: return 12;
    case ErrorCode::kInitFailed: return 13;
    case ErrorCode::kInsufficientDoF: return 14;
    case ErrorCode::kZeroVariance: return 15;
    case ErrorCode::kIoError: return 16;
  }
  return 1;
}

}  // namespace robsub
