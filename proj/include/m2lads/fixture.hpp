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

#include <cstdint>
#include <filesystem>
#include <string>

namespace m2lads::fixture {

/// Shape of a generated recording: a pretest, then a learning session of
/// `minutes` with 1 Hz EEG and heart rate, 10 Hz pupil diameter, alternating
/// activities from both logs, graded MOOC problems, and one video.
struct SessionSpec {
  std::string session_id = "session_ok";
  std::string learner_id = "u001";
  int minutes = 30;
  int activities = 12;
  int items = 10;
  std::uint64_t seed = 7;
  std::int64_t start_ms = 1677664800000;  // 2023-03-01T10:00:00Z
};

/// Counts of what was written, for assertions.
struct GeneratedSession {
  std::filesystem::path manifest;
  std::size_t eeg_rows_in_window = 0;
  std::size_t heart_rate_rows_in_window = 0;
  std::size_t pupil_rows_in_window = 0;
  std::int64_t window_start = 0;
  std::int64_t window_end = 0;
};

/// Writes all input files and `manifest.json` into `dir`. Output depends only
/// on `spec`.
GeneratedSession write_session(const std::filesystem::path& dir, const SessionSpec& spec);

}  // namespace m2lads::fixture
