/* Copyright 2026 The Fairhead Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "fairhead/common/error.h"

#include <fmt/format.h>

namespace fairhead {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kBadEnumValue: return "BadEnumValue";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kIdMismatch: return "IdMismatch";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kNonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::kUnsupportedParams: return "UnsupportedParams";
    case ErrorCode::kSingleGroup: return "SingleGroup";
    case ErrorCode::kTooFewGroups: return "TooFewGroups";
    case ErrorCode::kNoPositives: return "NoPositives";
    case ErrorCode::kEmptyGroup: return "EmptyGroup";
    case ErrorCode::kTooFewRuns: return "TooFewRuns";
    case ErrorCode::kInsufficientPairs: return "InsufficientPairs";
    case ErrorCode::kInfeasibleSchedule: return "InfeasibleSchedule";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kUsage: return "Usage";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", ErrorCodeName(code), message)),
      code_(code) {}

void RethrowWithContext(const Error& e, std::string_view context) {
  std::string what = e.what();
  // Strip the "<Code>: " prefix so it is not repeated.
  const std::string prefix = fmt::format("{}: ", ErrorCodeName(e.code()));
  if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
  throw Error(e.code(), fmt::format("{}: {}", context, what));
}

}  // namespace fairhead
