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

#include "m2lads/store.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "m2lads/error.hpp"
#include "m2lads/serialize.hpp"

namespace m2lads {

namespace fs = std::filesystem;
using nlohmann::json;

void to_json(json& j, const SessionRecord& r) {
  json lms = json::object();
  for (const auto& [kind, lm] : r.learner_matrices) lms[std::string(token_of(kind))] = lm;
  j = json{{"session_id", r.session_id},
           {"learner", r.learner},
           {"window", r.window},
           {"merged_matrix", r.merged_matrix},
           {"learner_matrices", std::move(lms)},
           {"blinks", r.blinks},
           {"pretest", r.pretest},
           {"posttest", r.posttest},
           {"performance", r.performance},
           {"correlations", r.correlations},
           {"summaries", r.summaries},
           {"frame_indexes", r.frame_indexes},
           {"created_at", r.created_at}};
}

void from_json(const json& j, SessionRecord& r) {
  r.session_id = j.at("session_id").get<std::string>();
  r.learner = j.at("learner").get<LearnerProfile>();
  r.window = j.at("window").get<SessionWindow>();
  r.merged_matrix = j.at("merged_matrix").get<ActivityMatrix>();
  r.learner_matrices.clear();
  for (const auto& [token, lm] : j.at("learner_matrices").items()) {
    auto kind = kind_from_token(token);
    if (!kind) throw json::other_error::create(501, "unknown signal kind '" + token + "'", &j);
    r.learner_matrices.emplace(*kind, lm.get<LearnerMatrix>());
  }
  r.blinks = j.at("blinks").get<BlinkEvents>();
  r.pretest = j.at("pretest").get<PretestMatrix>();
  r.posttest = j.at("posttest").get<PosttestMatrix>();
  r.performance = j.at("performance").get<PerformanceReport>();
  r.correlations = j.at("correlations").get<CorrelationMatrix>();
  r.summaries = j.at("summaries").get<ActivitySummary>();
  r.frame_indexes = j.at("frame_indexes").get<std::vector<VideoFrameIndex>>();
  r.created_at = j.at("created_at").get<TimestampMs>();
}

void to_json(json& j, const CatalogEntry& e) {
  j = json{{"session_id", e.session_id}, {"learner_id", e.learner_id}, {"window", e.window}, {"created_at", e.created_at}};
}

void from_json(const json& j, CatalogEntry& e) {
  e.session_id = j.at("session_id").get<std::string>();
  e.learner_id = j.at("learner_id").get<std::string>();
  e.window = j.at("window").get<SessionWindow>();
  e.created_at = j.at("created_at").get<TimestampMs>();
}

void to_json(json& j, const MediaRef& m) {
  j = json{{"session_id", m.session_id}, {"name", m.name}, {"relative_path", m.relative_path}, {"byte_size", m.byte_size}};
}

void to_json(json& j, const SignalPoint& p) {
  j = json{{"t", p.t}, {"mean", p.mean}, {"min", p.min}, {"max", p.max}, {"activity_id", p.activity_id}};
}

bool is_safe_name(std::string_view name) {
  if (name.empty() || name.size() > 200 || name.front() == '.') return false;
  for (unsigned char c : name) {
    if (c < 0x20 || c == 0x7f || c == '/' || c == '\\' || c == ':') return false;
  }
  return true;
}

namespace {

[[noreturn]] void invalid(const std::string& reason) { throw Error(ErrorCode::ValidationFailed, reason); }

void check_items(const std::vector<ItemScore>& rows, const char* what) {
  std::set<std::string_view> seen;
  for (const auto& r : rows) {
    if (!seen.insert(r.item).second) invalid(std::string(what) + " item '" + r.item + "' repeated");
    if (!(r.score >= 0.0 && r.score <= 1.0)) invalid(std::string(what) + " score out of [0,1] for '" + r.item + "'");
  }
}

}  // namespace

void validate_record(const SessionRecord& r) {
  if (!is_safe_name(r.session_id)) invalid("session_id '" + r.session_id + "' is not a plain name");
  if (r.learner.learner_id.empty()) invalid("learner_id is empty");
  const SessionWindow& w = r.window;
  if (w.start >= w.end) invalid("window start must precede end");

  if (!r.merged_matrix.is_sorted()) invalid("activity intervals are not sorted");
  for (const auto& iv : r.merged_matrix.intervals) {
    if (iv.activity_id.empty() || iv.t_start > iv.t_end) invalid("malformed activity interval");
    if (!w.contains(iv.t_start) || !w.contains(iv.t_end)) invalid("activity '" + iv.activity_id + "' outside window");
  }

  for (const auto& [kind, lm] : r.learner_matrices) {
    const std::string token(token_of(kind));
    if (lm.kind != kind) invalid("learner matrix filed under " + token + " has another kind");
    for (std::size_t i = 0; i < lm.rows.size(); ++i) {
      const auto& row = lm.rows[i];
      if (!w.contains(row.t)) invalid("learner matrix " + token + " extends outside the session window");
      if (i > 0 && row.t <= lm.rows[i - 1].t) invalid("learner matrix " + token + " timestamps not increasing");
      if (!std::isfinite(row.value) || !std::isfinite(row.window)) invalid("learner matrix " + token + " non-finite value");
      if (row.activity_id.empty()) invalid("learner matrix " + token + " row without activity");
    }
  }

  for (std::size_t i = 0; i < r.blinks.times.size(); ++i) {
    if (!w.contains(r.blinks.times[i])) invalid("blink outside session window");
    if (i > 0 && r.blinks.times[i] <= r.blinks.times[i - 1]) invalid("blinks not increasing");
  }

  check_items(r.pretest.rows, "pretest");
  check_items(r.posttest.rows, "posttest");

  const auto n = r.correlations.kinds.size();
  if (r.correlations.r.size() != n) invalid("correlation matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    if (r.correlations.r[i].size() != n) invalid("correlation matrix is not square");
    for (std::size_t j = 0; j < i; ++j) {
      if (r.correlations.r[i][j] != r.correlations.r[j][i]) invalid("correlation matrix is not symmetric");
    }
  }

  std::set<std::string_view> videos;
  for (const auto& v : r.frame_indexes) {
    if (v.video_id.empty() || !videos.insert(v.video_id).second) invalid("frame index video ids must be unique");
  }
}

std::vector<SignalPoint> downsample(const LearnerMatrix& lm, TimestampMs from, TimestampMs to, std::size_t max_points) {
  if (from > to || max_points == 0) throw Error(ErrorCode::InvalidRange, "need from <= to and max_points >= 1");
  const auto& rows = lm.rows;
  auto lo = std::lower_bound(rows.begin(), rows.end(), from, [](const LearnerRow& r, TimestampMs t) { return r.t < t; });
  auto hi = std::upper_bound(rows.begin(), rows.end(), to, [](TimestampMs t, const LearnerRow& r) { return t < r.t; });

  std::vector<SignalPoint> out;
  const auto count = static_cast<std::size_t>(hi - lo);
  if (count <= max_points) {
    for (auto it = lo; it != hi; ++it) out.push_back({it->t, it->value, it->value, it->value, it->activity_id});
    return out;
  }

  __extension__ typedef __int128 Wide;
  const Wide span = Wide(to) - Wide(from) + 1;
  const Wide buckets = static_cast<Wide>(max_points);
  auto bucket_of = [&](TimestampMs t) { return (Wide(t) - Wide(from)) * buckets / span; };
  auto bucket_start = [&](Wide b) { return static_cast<TimestampMs>(Wide(from) + (b * span + buckets - 1) / buckets); };

  Wide current = -1;
  double sum = 0.0;
  std::size_t n = 0;
  for (auto it = lo; it != hi; ++it) {
    Wide b = bucket_of(it->t);
    if (b != current) {
      if (n > 0) out.back().mean = sum / static_cast<double>(n);
      current = b;
      sum = 0.0;
      n = 0;
      out.push_back({bucket_start(b), it->value, it->value, it->value, it->activity_id});
    }
    auto& p = out.back();
    p.min = std::min(p.min, it->value);
    p.max = std::max(p.max, it->value);
    sum += it->value;
    ++n;
  }
  if (n > 0) out.back().mean = sum / static_cast<double>(n);
  return out;
}

std::vector<SignalPoint> SessionStore::query_signal(const std::string& session_id, SignalKind kind, TimestampMs from,
                                                    TimestampMs to, std::size_t max_points) const {
  if (from > to || max_points == 0) throw Error(ErrorCode::InvalidRange, "need from <= to and max_points >= 1");
  SessionRecord record = get_session(session_id);
  auto it = record.learner_matrices.find(kind);
  if (it == record.learner_matrices.end()) {
    throw Error(ErrorCode::NotFound, "session " + session_id + " has no " + std::string(token_of(kind)) + " signal");
  }
  return downsample(it->second, from, to, max_points);
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_sibling(const fs::path& target) {
  static std::atomic<unsigned> counter{0};
  std::ostringstream name;
  name << '.' << target.filename().string() << ".tmp-" << std::hash<std::thread::id>{}(std::this_thread::get_id())
       << '-' << counter++;
  return target.parent_path() / name.str();
}

void write_atomic(const fs::path& target, const std::string& content) {
  fs::path tmp = temp_sibling(target);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::IoError, "cannot write " + target.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot move " + tmp.string() + " into place");
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::StoreUnavailable, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

FileSessionStore::FileSessionStore(fs::path root) : root_(std::move(root)) {
  ensure_dir(root_ / "sessions");
  ensure_dir(root_ / "media");
}

fs::path FileSessionStore::record_path(const std::string& session_id) const {
  return root_ / "sessions" / session_id / "record.json";
}

fs::path FileSessionStore::media_path(const std::string& session_id, const std::string& name) const {
  if (!is_safe_name(name)) throw Error(ErrorCode::PathViolation, "media name '" + name + "' is not a plain file name");
  if (!is_safe_name(session_id)) throw Error(ErrorCode::NotFound, "session " + session_id);
  return root_ / "media" / session_id / name;
}

std::vector<CatalogEntry> FileSessionStore::read_catalog() const {
  fs::path path = root_ / "catalog.json";
  if (!fs::exists(path)) return {};
  try {
    return json::parse(read_file(path)).get<std::vector<CatalogEntry>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, "corrupt catalog: " + std::string(e.what()));
  }
}

void FileSessionStore::write_catalog(const std::vector<CatalogEntry>& entries) {
  write_atomic(root_ / "catalog.json", canonical_dump(json(entries)));
}

std::string FileSessionStore::put_session(const SessionRecord& record) {
  validate_record(record);
  std::string doc;
  try {
    doc = canonical_dump(json(record));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ValidationFailed, e.what());
  }

  std::unique_lock lock(mutex_);
  if (fs::exists(record_path(record.session_id))) throw Error(ErrorCode::DuplicateSession, record.session_id);
  ensure_dir(record_path(record.session_id).parent_path());
  write_atomic(record_path(record.session_id), doc);

  auto catalog = read_catalog();
  std::erase_if(catalog, [&](const CatalogEntry& e) { return e.session_id == record.session_id; });
  catalog.push_back({record.session_id, record.learner.learner_id, record.window, record.created_at});
  std::sort(catalog.begin(), catalog.end(), [](const auto& a, const auto& b) { return a.session_id < b.session_id; });
  write_catalog(catalog);
  return record.session_id;
}

bool FileSessionStore::has_session(const std::string& session_id) const {
  if (!is_safe_name(session_id)) return false;
  std::shared_lock lock(mutex_);
  return fs::exists(record_path(session_id));
}

SessionRecord FileSessionStore::get_session(const std::string& session_id) const {
  if (!is_safe_name(session_id)) throw Error(ErrorCode::NotFound, "session " + session_id);
  std::string text;
  {
    std::shared_lock lock(mutex_);
    fs::path path = record_path(session_id);
    if (!fs::exists(path)) throw Error(ErrorCode::NotFound, "session " + session_id);
    text = read_file(path);
  }
  try {
    return json::parse(text).get<SessionRecord>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, "corrupt record for " + session_id + ": " + e.what());
  }
}

std::vector<CatalogEntry> FileSessionStore::list_sessions(const SessionFilter& filter) const {
  std::vector<CatalogEntry> entries;
  {
    std::shared_lock lock(mutex_);
    entries = read_catalog();
  }
  std::erase_if(entries, [&](const CatalogEntry& e) {
    if (filter.learner_id && e.learner_id != *filter.learner_id) return true;
    if (filter.from && e.window.end < *filter.from) return true;
    if (filter.to && e.window.start > *filter.to) return true;
    return false;
  });
  std::sort(entries.begin(), entries.end(), [](const CatalogEntry& a, const CatalogEntry& b) {
    if (a.created_at != b.created_at) return a.created_at > b.created_at;
    return a.session_id < b.session_id;
  });
  return entries;
}

MediaRef FileSessionStore::attach_media(const std::string& session_id, const std::string& name, const fs::path& source) {
  fs::path target = media_path(session_id, name);
  std::unique_lock lock(mutex_);
  if (!fs::exists(record_path(session_id))) throw Error(ErrorCode::NotFound, "session " + session_id);
  if (!fs::is_regular_file(source)) throw Error(ErrorCode::InputMissing, "media source " + source.string());
  if (fs::exists(target)) throw Error(ErrorCode::NameCollision, session_id + "/" + name);
  ensure_dir(target.parent_path());

  fs::path tmp = temp_sibling(target);
  std::error_code ec;
  fs::copy_file(source, tmp, fs::copy_options::overwrite_existing, ec);
  if (!ec) fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot copy " + source.string());
  }
  return {session_id, name, (fs::path("media") / session_id / name).generic_string(), fs::file_size(target)};
}

MediaRef FileSessionStore::media_info(const std::string& session_id, const std::string& name) const {
  fs::path path = media_path(session_id, name);
  std::shared_lock lock(mutex_);
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::NotFound, "media " + session_id + "/" + name);
  return {session_id, name, (fs::path("media") / session_id / name).generic_string(), fs::file_size(path)};
}

std::vector<MediaRef> FileSessionStore::list_media(const std::string& session_id) const {
  std::vector<MediaRef> out;
  if (!is_safe_name(session_id)) return out;
  std::shared_lock lock(mutex_);
  fs::path dir = root_ / "media" / session_id;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || !is_safe_name(name)) continue;
    out.push_back({session_id, name, (fs::path("media") / session_id / name).generic_string(), entry.file_size()});
  }
  std::sort(out.begin(), out.end(), [](const MediaRef& a, const MediaRef& b) { return a.name < b.name; });
  return out;
}

std::ifstream FileSessionStore::open_media(const std::string& session_id, const std::string& name) const {
  fs::path path = media_path(session_id, name);
  std::shared_lock lock(mutex_);
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::NotFound, "media " + session_id + "/" + name);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

fs::path default_store_root(const fs::path& fallback) {
  if (const char* env = std::getenv("M2LADS_STORE_ROOT"); env && *env) return env;
  return fallback;
}

}  // namespace m2lads
