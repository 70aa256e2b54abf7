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

#include "m2lads/serialize.hpp"

#include "m2lads/error.hpp"

namespace m2lads {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_real(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

ActivitySource source_from(const std::string& s) {
  if (s == "logge") return ActivitySource::Logge;
  if (s == "mooc") return ActivitySource::Mooc;
  if (s == "merged") return ActivitySource::Merged;
  throw json::other_error::create(501, "unknown activity source '" + s + "'", nullptr);
}

}  // namespace

void to_json(json& j, SignalKind kind) { j = std::string(token_of(kind)); }

void from_json(const json& j, SignalKind& kind) {
  auto k = kind_from_token(j.get<std::string>());
  if (!k) throw json::other_error::create(501, "unknown signal kind '" + j.get<std::string>() + "'", &j);
  kind = *k;
}

void to_json(json& j, const SessionWindow& w) { j = json{{"start", w.start}, {"end", w.end}}; }

void from_json(const json& j, SessionWindow& w) {
  w.start = j.at("start").get<TimestampMs>();
  w.end = j.at("end").get<TimestampMs>();
}

void to_json(json& j, const ActivityInterval& iv) {
  j = json{{"activity_id", iv.activity_id}, {"t_start", iv.t_start}, {"t_end", iv.t_end}};
}

void from_json(const json& j, ActivityInterval& iv) {
  iv.activity_id = j.at("activity_id").get<std::string>();
  iv.t_start = j.at("t_start").get<TimestampMs>();
  iv.t_end = j.at("t_end").get<TimestampMs>();
}

void to_json(json& j, const ActivityMatrix& m) {
  j = json{{"source", std::string(to_string(m.source))}, {"intervals", m.intervals}};
}

void from_json(const json& j, ActivityMatrix& m) {
  m.source = source_from(j.at("source").get<std::string>());
  m.intervals = j.at("intervals").get<std::vector<ActivityInterval>>();
}

void to_json(json& j, const LearnerMatrix& lm) {
  json rows = json::array();
  for (const auto& r : lm.rows) {
    rows.push_back({{"t", r.t}, {"value", r.value}, {"window", r.window}, {"activity_id", r.activity_id}});
  }
  j = json{{"kind", lm.kind}, {"rows", std::move(rows)}};
}

void from_json(const json& j, LearnerMatrix& lm) {
  lm.kind = j.at("kind").get<SignalKind>();
  lm.rows.clear();
  for (const auto& r : j.at("rows")) {
    lm.rows.push_back({r.at("t").get<TimestampMs>(), r.at("value").get<double>(), r.at("window").get<double>(),
                       r.at("activity_id").get<std::string>()});
  }
}

void to_json(json& j, const BlinkEvents& b) { j = b.times; }

void from_json(const json& j, BlinkEvents& b) { b.times = j.get<std::vector<TimestampMs>>(); }

namespace {

json item_rows(const std::vector<ItemScore>& rows) {
  json out = json::array();
  for (const auto& r : rows) out.push_back({{"item", r.item}, {"score", r.score}});
  return out;
}

std::vector<ItemScore> item_rows_from(const json& j) {
  std::vector<ItemScore> rows;
  for (const auto& r : j) rows.push_back({r.at("item").get<std::string>(), r.at("score").get<double>()});
  return rows;
}

}  // namespace

void to_json(json& j, const PretestMatrix& m) { j = json{{"rows", item_rows(m.rows)}}; }
void from_json(const json& j, PretestMatrix& m) { m.rows = item_rows_from(j.at("rows")); }
void to_json(json& j, const PosttestMatrix& m) { j = json{{"rows", item_rows(m.rows)}}; }
void from_json(const json& j, PosttestMatrix& m) { m.rows = item_rows_from(j.at("rows")); }

void to_json(json& j, const PerformanceReport& r) {
  json rows = json::array();
  for (const auto& row : r.per_item) rows.push_back({{"item", row.item}, {"pre", opt(row.pre)}, {"post", opt(row.post)}});
  j = json{{"per_item", std::move(rows)}, {"pre_mean", r.pre_mean}, {"post_mean", r.post_mean}, {"gain", r.gain}};
}

void from_json(const json& j, PerformanceReport& r) {
  r.per_item.clear();
  for (const auto& row : j.at("per_item")) {
    r.per_item.push_back({row.at("item").get<std::string>(), opt_real(row.at("pre")), opt_real(row.at("post"))});
  }
  r.pre_mean = j.at("pre_mean").get<double>();
  r.post_mean = j.at("post_mean").get<double>();
  r.gain = j.at("gain").get<double>();
}

void to_json(json& j, const CorrelationMatrix& c) {
  json r = json::array();
  for (const auto& row : c.r) {
    json cells = json::array();
    for (const auto& cell : row) cells.push_back(opt(cell));
    r.push_back(std::move(cells));
  }
  j = json{{"kinds", c.kinds}, {"r", std::move(r)}};
}

void from_json(const json& j, CorrelationMatrix& c) {
  c.kinds = j.at("kinds").get<std::vector<SignalKind>>();
  c.r.clear();
  for (const auto& row : j.at("r")) {
    std::vector<std::optional<double>> cells;
    for (const auto& cell : row) cells.push_back(opt_real(cell));
    c.r.push_back(std::move(cells));
  }
}

void to_json(json& j, const ActivitySummary& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"activity_id", r.activity_id},
                    {"kind", r.kind},
                    {"mean", opt(r.mean)},
                    {"min", opt(r.min)},
                    {"max", opt(r.max)},
                    {"sample_count", r.sample_count},
                    {"duration_share", r.duration_share}});
  }
  j = json{{"rows", std::move(rows)}};
}

void from_json(const json& j, ActivitySummary& s) {
  s.rows.clear();
  for (const auto& r : j.at("rows")) {
    ActivityStats row;
    row.activity_id = r.at("activity_id").get<std::string>();
    row.kind = r.at("kind").get<SignalKind>();
    row.mean = opt_real(r.at("mean"));
    row.min = opt_real(r.at("min"));
    row.max = opt_real(r.at("max"));
    row.sample_count = r.at("sample_count").get<std::size_t>();
    row.duration_share = r.at("duration_share").get<double>();
    s.rows.push_back(std::move(row));
  }
}

void to_json(json& j, const VideoFrameIndex& v) {
  json rows = json::array();
  for (const auto& r : v.rows) rows.push_back({{"frame", r.frame_no}, {"t_ms", r.t}});
  j = json{{"video_id", v.video_id}, {"rows", std::move(rows)}};
}

void from_json(const json& j, VideoFrameIndex& v) {
  v.video_id = j.at("video_id").get<std::string>();
  v.rows.clear();
  for (const auto& r : j.at("rows")) v.rows.push_back({r.at("frame").get<std::int64_t>(), r.at("t_ms").get<TimestampMs>()});
}

void to_json(json& j, const LearnerProfile& p) { j = json{{"learner_id", p.learner_id}, {"attributes", p.attributes}}; }

void from_json(const json& j, LearnerProfile& p) {
  p.learner_id = j.at("learner_id").get<std::string>();
  p.attributes = j.at("attributes").get<std::map<std::string, std::string>>();
}

std::string canonical_dump(const json& j) { return j.dump() + "\n"; }

}  // namespace m2lads
