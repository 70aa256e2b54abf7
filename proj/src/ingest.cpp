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

#include "m2lads/ingest.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "m2lads/csv.hpp"
#include "m2lads/error.hpp"
#include "m2lads/timeline.hpp"

namespace m2lads {

using nlohmann::json;

namespace {

std::string text_of(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

bool is_blank_line(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

void require_fields(const csv::Record& rec, std::size_t n) {
  if (rec.fields.size() != n) {
    throw Error(ErrorCode::MalformedRow,
                "expected " + std::to_string(n) + " fields, got " + std::to_string(rec.fields.size()), rec.line);
  }
}

TimestampMs timestamp_field(const csv::Record& rec, std::size_t idx) {
  auto v = csv::parse_int(rec.fields[idx]);
  if (!v || *v < 0) throw Error(ErrorCode::MalformedRow, "bad timestamp '" + rec.fields[idx] + "'", rec.line);
  return *v;
}

double finite_field(const csv::Record& rec, std::size_t idx) {
  auto v = csv::parse_real(rec.fields[idx]);
  if (!v) throw Error(ErrorCode::MalformedRow, "bad number '" + rec.fields[idx] + "'", rec.line);
  if (!std::isfinite(*v)) throw Error(ErrorCode::NonFiniteValue, rec.fields[idx], rec.line);
  return *v;
}

void check_increasing(const csv::Record& rec, std::optional<TimestampMs>& prev, TimestampMs t) {
  if (prev && t <= *prev) {
    throw Error(ErrorCode::NonMonotonicTimestamps,
                std::to_string(t) + " does not follow " + std::to_string(*prev), rec.line);
  }
  prev = t;
}

std::optional<std::string> resource_of(const std::map<std::string, std::string>& payload) {
  for (const char* key : {"id", "problem_id", "module_id"}) {
    auto it = payload.find(key);
    if (it != payload.end() && !it->second.empty()) return it->second;
  }
  return std::nullopt;
}

}  // namespace

std::vector<EdxEvent> parse_edx_log(std::istream& in) {
  std::vector<EdxEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_line(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::MalformedEvent, e.what(), line_no);
    }
    if (!obj.is_object()) throw Error(ErrorCode::MalformedEvent, "event is not a JSON object", line_no);

    EdxEvent ev;
    for (const char* field : {"username", "event_type", "time"}) {
      auto it = obj.find(field);
      if (it == obj.end() || !it->is_string()) throw Error(ErrorCode::MissingField, field, line_no);
    }
    ev.username = obj["username"].get<std::string>();
    ev.event_type = obj["event_type"].get<std::string>();
    if (ev.event_type.empty()) throw Error(ErrorCode::MissingField, "event_type", line_no);
    try {
      ev.time = normalize_timestamp(obj["time"].get<std::string>());
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), line_no);
    }

    if (auto it = obj.find("event"); it != obj.end()) {
      json body = *it;
      // Browser-side events carry the body as a JSON-encoded string.
      if (body.is_string()) {
        json inner = json::parse(body.get<std::string>(), nullptr, false);
        if (inner.is_object()) body = std::move(inner);
      }
      if (body.is_object()) {
        for (const auto& [k, v] : body.items()) ev.payload[k] = text_of(v);
      } else if (!body.is_null()) {
        ev.payload["event"] = text_of(body);
      }
    }
    for (const auto& [k, v] : obj.items()) {
      if (k != "username" && k != "event_type" && k != "time" && k != "event") ev.extras[k] = text_of(v);
    }
    ev.resource_id = resource_of(ev.payload);
    events.push_back(std::move(ev));
  }
  return events;
}

std::vector<LoggeEvent> parse_logge_csv(std::istream& in) {
  csv::Reader reader(in);
  reader.expect_header({"time", "activity_id", "marker"});
  std::vector<LoggeEvent> events;
  while (auto rec = reader.next()) {
    require_fields(*rec, 3);
    LoggeEvent ev;
    const std::string& time = rec->fields[0];
    if (auto ms = csv::parse_int(time)) {
      if (*ms < 0) throw Error(ErrorCode::MalformedRow, "negative timestamp", rec->line);
      ev.time = *ms;
    } else {
      try {
        ev.time = normalize_timestamp(time);
      } catch (const Error& e) {
        throw Error(e.code(), e.detail(), rec->line);
      }
    }
    ev.activity_id = rec->fields[1];
    if (ev.activity_id.empty()) throw Error(ErrorCode::MalformedRow, "empty activity_id", rec->line);
    const std::string& marker = rec->fields[2];
    if (marker == "start") ev.marker = Marker::Start;
    else if (marker == "end") ev.marker = Marker::End;
    else throw Error(ErrorCode::UnknownMarker, marker, rec->line);
    events.push_back(std::move(ev));
  }
  return events;
}

SignalSeries parse_signal_csv(std::istream& in, SignalKind kind) {
  csv::Reader reader(in);
  reader.expect_header({"t_ms", "value"});
  SignalSeries series{kind, {}};
  std::optional<TimestampMs> prev;
  while (auto rec = reader.next()) {
    require_fields(*rec, 2);
    TimestampMs t = timestamp_field(*rec, 0);
    double v = finite_field(*rec, 1);
    check_increasing(*rec, prev, t);
    series.samples.push_back({t, v});
  }
  if (series.samples.empty()) throw Error(ErrorCode::EmptySeries, std::string(token_of(kind)));
  return series;
}

EegExport parse_eeg_csv(std::istream& in) {
  csv::Reader reader(in);
  reader.expect_header({"t_ms", "delta", "theta", "alpha", "beta", "gamma", "attention", "meditation", "blink"});
  EegExport out;
  for (std::size_t i = 0; i < kAllEegBands.size(); ++i) out.bands[i].kind = eeg_kind(kAllEegBands[i]);
  out.attention.kind = SignalKind::Attention;
  out.meditation.kind = SignalKind::Meditation;

  std::optional<TimestampMs> prev;
  while (auto rec = reader.next()) {
    require_fields(*rec, 9);
    TimestampMs t = timestamp_field(*rec, 0);
    std::array<double, 7> values{};
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = finite_field(*rec, i + 1);
    const std::string& blink = rec->fields[8];
    if (blink != "0" && blink != "1") throw Error(ErrorCode::InvalidBlinkFlag, blink, rec->line);
    check_increasing(*rec, prev, t);

    for (std::size_t i = 0; i < 5; ++i) out.bands[i].samples.push_back({t, values[i]});
    out.attention.samples.push_back({t, values[5]});
    out.meditation.samples.push_back({t, values[6]});
    if (blink == "1") out.blinks.times.push_back(t);
  }
  if (out.attention.samples.empty()) throw Error(ErrorCode::EmptySeries, "eeg export has no rows");
  return out;
}

PretestMatrix parse_pretest(std::istream& answers, std::istream& key) {
  std::map<std::string, std::string> correct;
  {
    csv::Reader reader(key);
    reader.expect_header({"item", "answer"});
    while (auto rec = reader.next()) {
      require_fields(*rec, 2);
      if (rec->fields[0].empty()) throw Error(ErrorCode::MalformedRow, "empty item", rec->line);
      if (!correct.emplace(rec->fields[0], rec->fields[1]).second) {
        throw Error(ErrorCode::DuplicateItem, rec->fields[0], rec->line);
      }
    }
  }

  PretestMatrix out;
  std::set<std::string> seen;
  csv::Reader reader(answers);
  reader.expect_header({"item", "answer"});
  while (auto rec = reader.next()) {
    require_fields(*rec, 2);
    const std::string& item = rec->fields[0];
    if (item.empty()) throw Error(ErrorCode::MalformedRow, "empty item", rec->line);
    if (!seen.insert(item).second) throw Error(ErrorCode::DuplicateItem, item, rec->line);
    auto it = correct.find(item);
    if (it == correct.end()) throw Error(ErrorCode::UnknownItem, item, rec->line);
    out.rows.push_back({item, rec->fields[1] == it->second ? 1.0 : 0.0});
  }
  return out;
}

VideoFrameIndex parse_frame_index(std::istream& in, std::string video_id) {
  csv::Reader reader(in);
  reader.expect_header({"frame", "t_ms"});
  VideoFrameIndex index{std::move(video_id), {}};
  while (auto rec = reader.next()) {
    require_fields(*rec, 2);
    auto frame = csv::parse_int(rec->fields[0]);
    if (!frame || *frame < 0) throw Error(ErrorCode::MalformedRow, "bad frame number '" + rec->fields[0] + "'", rec->line);
    TimestampMs t = timestamp_field(*rec, 1);
    if (!index.rows.empty() && (*frame <= index.rows.back().frame_no || t < index.rows.back().t)) {
      throw Error(ErrorCode::NonMonotonicFrames, "frame " + rec->fields[0], rec->line);
    }
    index.rows.push_back({*frame, t});
  }
  return index;
}

LearnerProfile parse_learner_profile(std::istream& in) {
  json obj = json::parse(in, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) throw Error(ErrorCode::InvalidProfile, "not a JSON object");
  auto id = obj.find("learner_id");
  if (id == obj.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw Error(ErrorCode::InvalidProfile, "learner_id must be a non-empty string");
  }
  LearnerProfile profile;
  profile.learner_id = id->get<std::string>();
  if (auto attrs = obj.find("attributes"); attrs != obj.end()) {
    if (!attrs->is_object()) throw Error(ErrorCode::InvalidProfile, "attributes must be an object");
    for (const auto& [k, v] : attrs->items()) profile.attributes[k] = text_of(v);
  }
  return profile;
}

void write_logge_csv(std::ostream& out, const std::vector<LoggeEvent>& events) {
  out << "time,activity_id,marker\n";
  for (const auto& ev : events) {
    out << format_timestamp(ev.time) << ',' << csv::escape(ev.activity_id) << ','
        << (ev.marker == Marker::Start ? "start" : "end") << '\n';
  }
}

void write_signal_csv(std::ostream& out, const SignalSeries& series) {
  out << "t_ms,value\n";
  for (const auto& s : series.samples) out << s.t << ',' << csv::format_real(s.value) << '\n';
}

}  // namespace m2lads
