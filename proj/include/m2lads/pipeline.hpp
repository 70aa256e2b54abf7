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

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "m2lads/store.hpp"

namespace m2lads {

/// Locations of one session's raw inputs. Relative paths are resolved
/// against the manifest's directory.
struct IngestManifest {
  std::string session_id;
  std::filesystem::path learner_profile_path;
  std::filesystem::path edx_log_path;
  std::filesystem::path logge_csv_path;
  std::filesystem::path pretest_answers_path;
  std::filesystem::path pretest_key_path;
  std::filesystem::path eeg_csv_path;
  std::map<SignalKind, std::filesystem::path> signal_csv_paths;
  std::map<std::string, std::filesystem::path> frame_index_paths;
  std::map<std::string, std::filesystem::path> media_paths;
  std::optional<std::filesystem::path> boundary_config_path;  // defaults when absent
  TimestampMs window_ms = kDefaultWindowMs;
  TimestampMs grid_ms = kDefaultGridMs;
};

IngestManifest manifest_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
IngestManifest load_manifest(const std::filesystem::path& path);

/// Throws InputMissing for the first referenced file that does not exist.
void check_inputs_exist(const IngestManifest& manifest);

/// Parses every input and derives the full session record without touching
/// any store. Signals are processed concurrently; the result does not depend
/// on scheduling.
SessionRecord build_session(const IngestManifest& manifest, TimestampMs created_at);

/// build_session, then put_session and media attachment.
SessionRecord ingest(const IngestManifest& manifest, SessionStore& store, TimestampMs created_at);

/// $M2LADS_FAKE_NOW when set, else the wall clock.
TimestampMs current_time_ms();

/// `t_ms,value,window,activity_id`
void write_learner_matrix_csv(std::ostream& out, const LearnerMatrix& lm);
LearnerMatrix parse_learner_matrix_csv(std::istream& in, SignalKind kind);

enum class ExportFormat { Csv, Json };

/// Writes learner matrices (one file per signal) and analytics into `dir`.
/// Returns the files written.
std::vector<std::filesystem::path> export_session(const SessionRecord& record, ExportFormat format,
                                                  const std::filesystem::path& dir);

}  // namespace m2lads
