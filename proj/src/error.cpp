// Copyright 2026 The braggsim Authors
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

#include "braggsim/error.hpp"

namespace braggsim {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::TooFewPeaks: return "TooFewPeaks";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::EigensolveFailure: return "EigensolveFailure";
    case ErrorCode::NonPhysicalGram: return "NonPhysicalGram";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_numeric_guard(ErrorCode code) {
  switch (code) {
    case ErrorCode::TruncationTooSmall:
    case ErrorCode::StepTooLarge:
    case ErrorCode::EigensolveFailure:
    case ErrorCode::NonPhysicalGram:
    case ErrorCode::TooFewPeaks:
    case ErrorCode::DegenerateInput:
    case ErrorCode::GridMismatch:
    case ErrorCode::DimensionMismatch:
      return true;
    default:
      return false;
  }
}

}  // namespace braggsim
