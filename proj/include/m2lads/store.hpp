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
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "m2lads/activity.hpp"
#include "m2lads/analytics.hpp"
#include "m2lads/ingest.hpp"
#include "m2lads/timeline.hpp"

namespace m2lads {

/// Everything derived from one learning session.
struct SessionRecord {
  std::string session_id;
  LearnerProfile learner;
  SessionWindow window;
  ActivityMatrix merged_matrix;
  std::map<SignalKind, LearnerMatrix> learner_matrices;
  BlinkEvents blinks;
  PretestMatrix pretest;
  PosttestMatrix posttest;
  PerformanceReport performance;
  CorrelationMatrix correlations;
  ActivitySummary summaries;
  std::vector<VideoFrameIndex> frame_indexes;
  TimestampMs created_at = 0;

  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

void to_json(nlohmann::json& j, const SessionRecord& r);
void from_json(const nlohmann::json& j, SessionRecord& r);

/// Checks the record's internal invariants; throws ValidationFailed.
void validate_record(const SessionRecord& record);

/// Session ids and media names become path components and must be plain
/// names: no separators, no "." or "..", no control characters.
bool is_safe_name(std::string_view name);

struct CatalogEntry {
  std::string session_id;
  std::string learner_id;
  SessionWindow window;
  TimestampMs created_at = 0;
  friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

void to_json(nlohmann::json& j, const CatalogEntry& e);
void from_json(const nlohmann::json& j, CatalogEntry& e);

struct SessionFilter {
  std::optional<std::string> learner_id;
  /// Keeps sessions whose window intersects [from, to].
  std::optional<TimestampMs> from;
  std::optional<TimestampMs> to;
};

struct MediaRef {
  std::string session_id;
  std::string name;
  std::string relative_path;  // relative to the store root
  std::uint64_t byte_size = 0;
  friend bool operator==(const MediaRef&, const MediaRef&) = default;
};

void to_json(nlohmann::json& j, const MediaRef& m);

/// One downsampled chart point. Raw rows pass through with mean = min = max.
struct SignalPoint {
  TimestampMs t = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::string activity_id;
  friend bool operator==(const SignalPoint&, const SignalPoint&) = default;
};

void to_json(nlohmann::json& j, const SignalPoint& p);

/// Rows of `lm` with t in [from, to], reduced to at most `max_points`
/// equal-time buckets when there are more rows than that. Empty buckets are
/// omitted; a bucket is stamped with its start time and the activity of its
/// first row.
std::vector<SignalPoint> downsample(const LearnerMatrix& lm, TimestampMs from, TimestampMs to, std::size_t max_points);

/// Storage backend for sessions and their media.
class SessionStore {
 public:
  virtual ~SessionStore() = default;

  virtual std::string put_session(const SessionRecord& record) = 0;
  virtual SessionRecord get_session(const std::string& session_id) const = 0;
  virtual bool has_session(const std::string& session_id) const = 0;
  virtual std::vector<CatalogEntry> list_sessions(const SessionFilter& filter = {}) const = 0;

  virtual MediaRef attach_media(const std::string& session_id, const std::string& name,
                                const std::filesystem::path& source) = 0;
  virtual MediaRef media_info(const std::string& session_id, const std::string& name) const = 0;
  virtual std::vector<MediaRef> list_media(const std::string& session_id) const = 0;
  virtual std::ifstream open_media(const std::string& session_id, const std::string& name) const = 0;

  std::vector<SignalPoint> query_signal(const std::string& session_id, SignalKind kind, TimestampMs from,
                                        TimestampMs to, std::size_t max_points) const;
};

/// File-backed store:
///   <root>/catalog.json
///   <root>/sessions/<id>/record.json
///   <root>/media/<id>/<name>
/// Files are written to a temporary name and renamed into place, so readers
/// never observe partial documents. One writer at a time per process.
class FileSessionStore final : public SessionStore {
 public:
  explicit FileSessionStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  std::string put_session(const SessionRecord& record) override;
  SessionRecord get_session(const std::string& session_id) const override;
  bool has_session(const std::string& session_id) const override;
  std::vector<CatalogEntry> list_sessions(const SessionFilter& filter = {}) const override;

  MediaRef attach_media(const std::string& session_id, const std::string& name,
                        const std::filesystem::path& source) override;
  MediaRef media_info(const std::string& session_id, const std::string& name) const override;
  std::vector<MediaRef> list_media(const std::string& session_id) const override;
  std::ifstream open_media(const std::string& session_id, const std::string& name) const override;

  std::filesystem::path media_path(const std::string& session_id, const std::string& name) const;

 private:
  std::filesystem::path record_path(const std::string& session_id) const;
  std::vector<CatalogEntry> read_catalog() const;
  void write_catalog(const std::vector<CatalogEntry>& entries);

  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
};

/// Store root from $M2LADS_STORE_ROOT, else `fallback`.
std::filesystem::path default_store_root(const std::filesystem::path& fallback = "m2lads_store");

}  // namespace m2lads
