// Copyright 2026 The m2lads Authors
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

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace m2lads {

enum class ErrorCode {
  // ingest
  MalformedEvent,
  MissingField,
  MalformedRow,
  InvalidHeader,
  UnknownMarker,
  NonMonotonicTimestamps,
  NonFiniteValue,
  EmptySeries,
  InvalidBlinkFlag,
  NonPositiveFrequency,
  UnknownItem,
  DuplicateItem,
  NonMonotonicFrames,
  InvalidProfile,
  InvalidConfig,
  // timeline
  InvalidTimestamp,
  NoTemporalOverlap,
  EmptyWindow,
  InvalidGridStep,
  InvalidArgument,
  // activity
  EndWithoutStart,
  // analytics
  LengthMismatch,
  TooFewPoints,
  GridMismatch,
  InvalidGrade,
  // store
  DuplicateSession,
  ValidationFailed,
  NotFound,
  NameCollision,
  PathViolation,
  InvalidRange,
  // pipeline / service
  InvalidManifest,
  InputMissing,
  IoError,
  BindFailure,
  StoreUnavailable,
};

std::string_view to_string(ErrorCode code);

/// How an error is surfaced at process and HTTP boundaries.
enum class ErrorCategory { NotFound, Validation, Collision, Io, Internal };

ErrorCategory category_of(ErrorCode code);

/// Every failure in the library is reported as an Error. Parse errors carry
/// the 1-based line of the first offending record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail, std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<std::size_t> line_;
};

}  // namespace m2lads
