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

#ifndef FAIRHEAD_COMMON_ERROR_H_
#define FAIRHEAD_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairhead {

// Every failure raised by the library carries one of these codes so callers
// (and the CLI exit-code mapping) can dispatch without parsing messages.
enum class ErrorCode {
  kBadMagic,
  kTruncatedFile,
  kNonFiniteValue,
  kMissingColumn,
  kBadEnumValue,
  kDuplicateId,
  kIdMismatch,
  kInvalidSpec,
  kDegenerateData,
  kDimMismatch,
  kSingleClass,
  kNonFiniteFeature,
  kUnsupportedParams,
  kSingleGroup,
  kTooFewGroups,
  kNoPositives,
  kEmptyGroup,
  kTooFewRuns,
  kInsufficientPairs,
  kInfeasibleSchedule,
  kIoError,
  kUsage,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Rethrows `e` with `context` prepended to the message, keeping the code.
[[noreturn]] void RethrowWithContext(const Error& e, std::string_view context);

}  // namespace fairhead

#endif  // FAIRHEAD_COMMON_ERROR_H_
