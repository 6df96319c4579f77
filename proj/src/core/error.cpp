// Copyright 2026 The instahide-toolkit Authors.
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

#include "core/error.hpp"

namespace ih {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kIo: return "I/O error";
    case ErrorCode::kDegenerate: return "degenerate input";
    case ErrorCode::kInfeasible: return "infeasible constraint";
    case ErrorCode::kDimMismatch: return "dimension mismatch";
    case ErrorCode::kValidation: return "validation error";
    case ErrorCode::kDiverged: return "diverged";
    case ErrorCode::kInsufficientData: return "insufficient data";
  }
  return "unknown error";
}

}  // namespace ih
