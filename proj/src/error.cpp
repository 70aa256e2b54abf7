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

#include "m2lads/error.hpp"

namespace m2lads {

namespace {

std::string compose(ErrorCode code, const std::string& detail, std::optional<std::size_t> line) {
  std::string msg(to_string(code));
  if (line) msg += " at line " + std::to_string(*line);
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedEvent: return "MalformedEvent";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::InvalidHeader: return "InvalidHeader";
    case ErrorCode::UnknownMarker: return "UnknownMarker";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::InvalidBlinkFlag: return "InvalidBlinkFlag";
    case ErrorCode::NonPositiveFrequency: return "NonPositiveFrequency";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::DuplicateItem: return "DuplicateItem";
    case ErrorCode::NonMonotonicFrames: return "NonMonotonicFrames";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidTimestamp: return "InvalidTimestamp";
    case ErrorCode::NoTemporalOverlap: return "NoTemporalOverlap";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::InvalidGridStep: return "InvalidGridStep";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EndWithoutStart: return "EndWithoutStart";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InvalidGrade: return "InvalidGrade";
    case ErrorCode::DuplicateSession: return "DuplicateSession";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::NameCollision: return "NameCollision";
    case ErrorCode::PathViolation: return "PathViolation";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::InputMissing: return "InputMissing";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BindFailure: return "BindFailure";
    case ErrorCode::StoreUnavailable: return "StoreUnavailable";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
      return ErrorCategory::NotFound;
    case ErrorCode::DuplicateSession:
    case ErrorCode::NameCollision:
      return ErrorCategory::Collision;
    case ErrorCode::InputMissing:
    case ErrorCode::IoError:
    case ErrorCode::StoreUnavailable:
    case ErrorCode::BindFailure:
      return ErrorCategory::Io;
    default:
      return ErrorCategory::Validation;
  }
}

Error::Error(ErrorCode code, std::string detail, std::optional<std::size_t> line)
    : std::runtime_error(compose(code, detail, line)), code_(code), detail_(std::move(detail)), line_(line) {}

}  // namespace m2lads
