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

#include "inferq/error.h"

namespace inferq {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kUnknownColumn: return "UnknownColumn";
    case ErrorCode::kUnknownTable: return "UnknownTable";
    case ErrorCode::kUnknownModel: return "UnknownModel";
    case ErrorCode::kUnknownVersion: return "UnknownVersion";
    case ErrorCode::kTypeMismatch: return "TypeMismatch";
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kDuplicateColumn: return "DuplicateColumn";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kMissingFeature: return "MissingFeature";
    case ErrorCode::kMissingValue: return "MissingValueError";
    case ErrorCode::kNonFinite: return "NonFiniteError";
    case ErrorCode::kUnsatisfiablePredicate: return "UnsatisfiablePredicate";
    case ErrorCode::kMissingStats: return "MissingStats";
    case ErrorCode::kDigestMismatch: return "DigestMismatch";
    case ErrorCode::kConflict: return "ConflictError";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kEquivalenceFailure: return "EquivalenceFailure";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kUsage: return "UsageError";
  }
  return "Error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

}  // namespace inferq
