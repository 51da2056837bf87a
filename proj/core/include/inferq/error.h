/*
 * Copyright 2026 The inferq Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef INFERQ_ERROR_H_
#define INFERQ_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace inferq {

enum class ErrorCode {
  kParseError,
  kSyntaxError,
  kValidationError,
  kUnknownColumn,
  kUnknownTable,
  kUnknownModel,
  kUnknownVersion,
  kTypeMismatch,
  kArityMismatch,
  kDuplicateColumn,
  kDivisionByZero,
  kMissingFeature,
  kMissingValue,
  kNonFinite,
  kUnsatisfiablePredicate,
  kMissingStats,
  kDigestMismatch,
  kConflict,
  kMissingColumn,
  kEquivalenceFailure,
  kIoError,
  kUsage,
};

std::string_view error_code_name(ErrorCode code);

// Every failure surfaced by the library is an Error carrying a stable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace inferq

#endif  // INFERQ_ERROR_H_
