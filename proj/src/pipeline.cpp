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

#include "m2lads/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>

#include "m2lads/csv.hpp"
#include "m2lads/error.hpp"
#include "m2lads/serialize.hpp"

namespace m2lads {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad_manifest(const std::string& why) { throw Error(ErrorCode::InvalidManifest, why); }

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string required_string(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_string() || it->get<std::string>().empty()) {
    bad_manifest(std::string("'") + key + "' must be a non-empty string");
  }
  return it->get<std::string>();
}

std::map<std::string, std::string> string_map(const json& doc, const char* key) {
  std::map<std::string, std::string> out;
  auto it = doc.find(key);
  if (it == doc.end()) return out;
  if (!it->is_object()) bad_manifest(std::string("'") + key + "' must be an object");
  for (const auto& [k, v] : it->items()) {
    if (!v.is_string() || v.get<std::string>().empty()) bad_manifest(std::string("'") + key + "." + k + "' must be a path");
    out.emplace(k, v.get<std::string>());
  }
  return out;
}

TimestampMs positive_ms(const json& doc, const char* key, TimestampMs fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!it->is_number_integer() || it->get<TimestampMs>() <= 0) bad_manifest(std::string("'") + key + "' must be a positive integer");
  return it->get<TimestampMs>();
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InputMissing, path.string());
  return in;
}

// Parses one input file, prefixing errors with its path.
template <typename Fn>
auto parse_file(const fs::path& path, Fn&& fn) {
  auto in = open_input(path);
  try {
    return fn(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail(), e.line());
  }
}

}  // namespace

IngestManifest manifest_from_json(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) bad_manifest("manifest must be a JSON object");
  IngestManifest m;
  m.session_id = required_string(doc, "session_id");
  if (!is_safe_name(m.session_id)) bad_manifest("session_id '" + m.session_id + "' is not a plain name");
  m.learner_profile_path = resolve(base_dir, required_string(doc, "learner_profile_path"));
  m.edx_log_path = resolve(base_dir, required_string(doc, "edx_log_path"));
  m.logge_csv_path = resolve(base_dir, required_string(doc, "logge_csv_path"));
  m.pretest_answers_path = resolve(base_dir, required_string(doc, "pretest_answers_path"));
  m.pretest_key_path = resolve(base_dir, required_string(doc, "pretest_key_path"));
  m.eeg_csv_path = resolve(base_dir, required_string(doc, "eeg_csv_path"));

  for (const auto& [token, path] : string_map(doc, "signal_csv_paths")) {
    auto kind = kind_from_token(token);
    if (!kind) bad_manifest("unknown signal kind '" + token + "'");
    if (band_of(*kind) || *kind == SignalKind::Attention || *kind == SignalKind::Meditation) {
      bad_manifest("signal '" + token + "' comes from the EEG export");
    }
    m.signal_csv_paths.emplace(*kind, resolve(base_dir, path));
  }
  for (const auto& [video, path] : string_map(doc, "frame_index_paths")) m.frame_index_paths.emplace(video, resolve(base_dir, path));
  for (const auto& [name, path] : string_map(doc, "media_paths")) {
    if (!is_safe_name(name)) throw Error(ErrorCode::PathViolation, "media name '" + name + "'");
    m.media_paths.emplace(name, resolve(base_dir, path));
  }
  if (auto it = doc.find("boundary_config_path"); it != doc.end() && !it->is_null()) {
    if (!it->is_string() || it->get<std::string>().empty()) bad_manifest("'boundary_config_path' must be a path");
    m.boundary_config_path = resolve(base_dir, it->get<std::string>());
  }
  m.window_ms = positive_ms(doc, "window_ms", kDefaultWindowMs);
  m.grid_ms = positive_ms(doc, "grid_ms", kDefaultGridMs);
  return m;
}

IngestManifest load_manifest(const fs::path& path) {
  auto in = open_input(path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) bad_manifest(path.string() + " is not valid JSON");
  return manifest_from_json(doc, path.parent_path());
}

void check_inputs_exist(const IngestManifest& m) {
  std::vector<fs::path> paths = {m.learner_profile_path, m.edx_log_path,     m.logge_csv_path,
                                 m.pretest_answers_path, m.pretest_key_path, m.eeg_csv_path};
  for (const auto& [_, p] : m.signal_csv_paths) paths.push_back(p);
  for (const auto& [_, p] : m.frame_index_paths) paths.push_back(p);
  for (const auto& [_, p] : m.media_paths) paths.push_back(p);
  if (m.boundary_config_path) paths.push_back(*m.boundary_config_path);
  for (const auto& p : paths) {
    if (!fs::is_regular_file(p)) throw Error(ErrorCode::InputMissing, p.string());
  }
}

SessionRecord build_session(const IngestManifest& m, TimestampMs created_at) {
  check_inputs_exist(m);

  auto profile = parse_file(m.learner_profile_path, [](std::istream& in) { return parse_learner_profile(in); });
  auto edx = parse_file(m.edx_log_path, [](std::istream& in) { return parse_edx_log(in); });
  auto logge = parse_file(m.logge_csv_path, [](std::istream& in) { return parse_logge_csv(in); });
  auto eeg = parse_file(m.eeg_csv_path, [](std::istream& in) { return parse_eeg_csv(in); });
  PretestMatrix pretest;
  {
    auto key = open_input(m.pretest_key_path);
    pretest = parse_file(m.pretest_answers_path, [&](std::istream& in) { return parse_pretest(in, key); });
  }
  BoundaryConfig boundaries = BoundaryConfig::defaults();
  if (m.boundary_config_path) {
    boundaries = parse_file(*m.boundary_config_path, [](std::istream& in) { return parse_boundary_config(in); });
  }

  std::vector<SignalSeries> series(eeg.bands.begin(), eeg.bands.end());
  series.push_back(std::move(eeg.attention));
  series.push_back(std::move(eeg.meditation));
  for (const auto& [kind, path] : m.signal_csv_paths) {
    series.push_back(parse_file(path, [kind = kind](std::istream& in) { return parse_signal_csv(in, kind); }));
  }
  std::sort(series.begin(), series.end(), [](const auto& a, const auto& b) { return a.kind < b.kind; });

  std::vector<VideoFrameIndex> frames;
  for (const auto& [video, path] : m.frame_index_paths) {
    frames.push_back(parse_file(path, [&video = video](std::istream& in) { return parse_frame_index(in, video); }));
  }

  auto by_time = [](const auto& a, const auto& b) { return a.time < b.time; };
  std::stable_sort(edx.begin(), edx.end(), by_time);
  std::stable_sort(logge.begin(), logge.end(), by_time);

  const SessionWindow initial = session_window(series);
  ActivityMatrix logge_matrix = logge_to_activity_matrix(logge, initial);
  ActivityMatrix mooc_matrix = edx_to_activity_matrix(edx, initial, boundaries);
  SyncResult sync = synchronize(std::move(series), {std::move(logge_matrix), std::move(mooc_matrix)});

  SessionRecord record;
  record.session_id = m.session_id;
  record.learner = std::move(profile);
  record.window = sync.window;
  record.merged_matrix = merge_activity_matrices(sync.matrices[0], sync.matrices[1]);
  record.created_at = created_at;

  struct PerSignal {
    LearnerMatrix lm;
    ResampledSeries grid;
    ActivitySummary summary;
  };
  const ActivityMatrix& merged = record.merged_matrix;
  const SessionWindow window = record.window;
  std::vector<std::future<PerSignal>> jobs;
  for (const auto& s : sync.series) {
    jobs.push_back(std::async(std::launch::async, [&s, &merged, window, &m] {
      PerSignal out;
      out.lm = build_learner_matrix(annotate_windows(s, m.window_ms), merged);
      out.grid = resample(s, window, m.grid_ms, m.window_ms);
      out.summary = summarize_by_activity(out.lm, window, merged);
      return out;
    }));
  }
  std::vector<ResampledSeries> grids;
  for (auto& job : jobs) {
    PerSignal done = job.get();
    grids.push_back(std::move(done.grid));
    record.summaries.rows.insert(record.summaries.rows.end(), done.summary.rows.begin(), done.summary.rows.end());
    record.learner_matrices.emplace(done.lm.kind, std::move(done.lm));
  }
  record.correlations = correlation_matrix(grids);

  for (TimestampMs t : eeg.blinks.times) {
    if (record.window.contains(t)) record.blinks.times.push_back(t);
  }
  record.pretest = std::move(pretest);
  record.posttest = score_posttest(edx);
  record.performance = compare_performance(record.pretest, record.posttest);
  record.frame_indexes = std::move(frames);
  return record;
}

SessionRecord ingest(const IngestManifest& manifest, SessionStore& store, TimestampMs created_at) {
  SessionRecord record = build_session(manifest, created_at);
  store.put_session(record);
  for (const auto& [name, path] : manifest.media_paths) store.attach_media(record.session_id, name, path);
  return record;
}

TimestampMs current_time_ms() {
  if (const char* fake = std::getenv("M2LADS_FAKE_NOW"); fake && *fake) {
    auto v = csv::parse_int(fake);
    if (!v || *v < 0) throw Error(ErrorCode::InvalidArgument, "M2LADS_FAKE_NOW must be epoch milliseconds");
    return *v;
  }
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

void write_learner_matrix_csv(std::ostream& out, const LearnerMatrix& lm) {
  out << "t_ms,value,window,activity_id\n";
  for (const auto& r : lm.rows) {
    out << r.t << ',' << csv::format_real(r.value) << ',' << csv::format_real(r.window) << ','
        << csv::escape(r.activity_id) << '\n';
  }
}

LearnerMatrix parse_learner_matrix_csv(std::istream& in, SignalKind kind) {
  csv::Reader reader(in);
  reader.expect_header({"t_ms", "value", "window", "activity_id"});
  LearnerMatrix lm{kind, {}};
  while (auto rec = reader.next()) {
    if (rec->fields.size() != 4) throw Error(ErrorCode::MalformedRow, "expected 4 fields", rec->line);
    auto t = csv::parse_int(rec->fields[0]);
    auto value = csv::parse_real(rec->fields[1]);
    auto window = csv::parse_real(rec->fields[2]);
    if (!t || !value || !window || rec->fields[3].empty()) throw Error(ErrorCode::MalformedRow, "bad learner row", rec->line);
    if (!std::isfinite(*value) || !std::isfinite(*window)) throw Error(ErrorCode::NonFiniteValue, "", rec->line);
    if (!lm.rows.empty() && *t <= lm.rows.back().t) throw Error(ErrorCode::NonMonotonicTimestamps, "", rec->line);
    lm.rows.push_back({*t, *value, *window, rec->fields[3]});
  }
  return lm;
}

namespace {

std::string opt_cell(const std::optional<double>& v) { return v ? csv::format_real(*v) : std::string(); }

class OutputFile {
 public:
  OutputFile(const fs::path& path, std::vector<fs::path>& written) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    written.push_back(path);
  }
  ~OutputFile() noexcept(false) {
    out_.flush();
    if (!out_ && std::uncaught_exceptions() == 0) throw Error(ErrorCode::IoError, "cannot write " + path_.string());
  }
  std::ostream& stream() { return out_; }

 private:
  fs::path path_;
  std::ofstream out_;
};

}  // namespace

std::vector<fs::path> export_session(const SessionRecord& record, ExportFormat format, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
  std::vector<fs::path> written;

  if (format == ExportFormat::Json) {
    json lms = json::object();
    for (const auto& [kind, lm] : record.learner_matrices) lms[std::string(token_of(kind))] = lm;
    OutputFile(dir / "learner_matrices.json", written).stream() << canonical_dump(lms);
    json analytics{{"session_id", record.session_id},
                   {"window", record.window},
                   {"activities", record.merged_matrix},
                   {"pretest", record.pretest},
                   {"posttest", record.posttest},
                   {"performance", record.performance},
                   {"correlations", record.correlations},
                   {"summaries", record.summaries}};
    OutputFile(dir / "analytics.json", written).stream() << canonical_dump(analytics);
    return written;
  }

  for (const auto& [kind, lm] : record.learner_matrices) {
    OutputFile f(dir / ("lm_" + std::string(token_of(kind)) + ".csv"), written);
    write_learner_matrix_csv(f.stream(), lm);
  }
  {
    OutputFile f(dir / "activities.csv", written);
    f.stream() << "activity_id,t_start,t_end\n";
    for (const auto& iv : record.merged_matrix.intervals) {
      f.stream() << csv::escape(iv.activity_id) << ',' << iv.t_start << ',' << iv.t_end << '\n';
    }
  }
  {
    OutputFile f(dir / "correlations.csv", written);
    auto& out = f.stream();
    out << "kind";
    for (SignalKind k : record.correlations.kinds) out << ',' << token_of(k);
    out << '\n';
    for (std::size_t i = 0; i < record.correlations.kinds.size(); ++i) {
      out << token_of(record.correlations.kinds[i]);
      for (const auto& cell : record.correlations.r[i]) out << ',' << opt_cell(cell);
      out << '\n';
    }
  }
  {
    OutputFile f(dir / "performance.csv", written);
    auto& out = f.stream();
    out << "item,pre,post\n";
    for (const auto& row : record.performance.per_item) {
      out << csv::escape(row.item) << ',' << opt_cell(row.pre) << ',' << opt_cell(row.post) << '\n';
    }
  }
  {
    OutputFile f(dir / "summaries.csv", written);
    auto& out = f.stream();
    out << "activity_id,kind,mean,min,max,sample_count,duration_share\n";
    for (const auto& row : record.summaries.rows) {
      out << csv::escape(row.activity_id) << ',' << token_of(row.kind) << ',' << opt_cell(row.mean) << ','
          << opt_cell(row.min) << ',' << opt_cell(row.max) << ',' << row.sample_count << ','
          << csv::format_real(row.duration_share) << '\n';
    }
  }
  return written;
}

}  // namespace m2lads
