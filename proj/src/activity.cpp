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

#include "m2lads/activity.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <set>
#include <tuple>

#include <json.hpp>

#include "m2lads/error.hpp"

namespace m2lads {

using nlohmann::json;

std::string_view to_string(ActivitySource source) {
  switch (source) {
    case ActivitySource::Logge: return "logge";
    case ActivitySource::Mooc: return "mooc";
    case ActivitySource::Merged: return "merged";
  }
  return "";
}

bool interval_less(const ActivityInterval& a, const ActivityInterval& b) {
  return std::tie(a.t_start, a.activity_id, a.t_end) < std::tie(b.t_start, b.activity_id, b.t_end);
}

void ActivityMatrix::sort() { std::sort(intervals.begin(), intervals.end(), interval_less); }

bool ActivityMatrix::is_sorted() const { return std::is_sorted(intervals.begin(), intervals.end(), interval_less); }

BoundaryConfig BoundaryConfig::defaults() {
  BoundaryConfig cfg;
  cfg.event_types = {
      {"play_video", {BoundaryAction::Opens, "video:{id}"}},
      {"pause_video", {BoundaryAction::Closes, ""}},
      {"stop_video", {BoundaryAction::Closes, ""}},
      {"seq_goto", {BoundaryAction::Opens, "sequence:{id}"}},
      {"seq_next", {BoundaryAction::Opens, "sequence:{id}"}},
      {"seq_prev", {BoundaryAction::Opens, "sequence:{id}"}},
      {"page_close", {BoundaryAction::Closes, ""}},
      {"problem_check", {BoundaryAction::Ignored, ""}},
  };
  return cfg;
}

BoundaryRule BoundaryConfig::rule_for(std::string_view event_type) const {
  auto it = event_types.find(event_type);
  return it == event_types.end() ? BoundaryRule{} : it->second;
}

BoundaryConfig parse_boundary_config(std::istream& in) {
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::InvalidConfig, "boundary config is not a JSON object");
  auto types = doc.find("event_types");
  if (types == doc.end() || !types->is_object()) throw Error(ErrorCode::InvalidConfig, "missing object 'event_types'");

  BoundaryConfig cfg;
  for (const auto& [name, rule] : types->items()) {
    if (!rule.is_object() || !rule.contains("action") || !rule["action"].is_string()) {
      throw Error(ErrorCode::InvalidConfig, "event type '" + name + "' needs a string 'action'");
    }
    const auto action = rule["action"].get<std::string>();
    BoundaryRule r;
    if (action == "opens") {
      r.action = BoundaryAction::Opens;
      auto label = rule.find("label");
      if (label == rule.end() || !label->is_string() || label->get<std::string>().empty()) {
        throw Error(ErrorCode::InvalidConfig, "opening event type '" + name + "' needs a non-empty 'label'");
      }
      r.label = label->get<std::string>();
    } else if (action == "closes") {
      r.action = BoundaryAction::Closes;
    } else if (action == "ignored") {
      r.action = BoundaryAction::Ignored;
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown action '" + action + "' for '" + name + "'");
    }
    cfg.event_types.emplace(name, std::move(r));
  }
  return cfg;
}

std::optional<std::string> expand_label(std::string_view label_template, const std::optional<std::string>& resource_id) {
  static constexpr std::string_view kPlaceholder = "{id}";
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto hit = label_template.find(kPlaceholder, pos);
    if (hit == std::string_view::npos) break;
    if (!resource_id) return std::nullopt;
    out.append(label_template.substr(pos, hit - pos));
    out.append(*resource_id);
    pos = hit + kPlaceholder.size();
  }
  out.append(label_template.substr(pos));
  return out;
}

ActivityMatrix logge_to_activity_matrix(const std::vector<LoggeEvent>& events, const SessionWindow& window) {
  ActivityMatrix m{ActivitySource::Logge, {}};
  std::map<std::string, std::deque<TimestampMs>> open;
  for (const auto& ev : events) {
    auto& starts = open[ev.activity_id];
    if (ev.marker == Marker::Start) {
      starts.push_back(ev.time);
      continue;
    }
    if (starts.empty()) {
      throw Error(ErrorCode::EndWithoutStart, ev.activity_id + " at " + std::to_string(ev.time));
    }
    m.intervals.push_back({ev.activity_id, starts.front(), ev.time});
    starts.pop_front();
  }
  for (const auto& [id, starts] : open) {
    for (TimestampMs s : starts) m.intervals.push_back({id, s, std::max(s, window.end)});
  }
  m.sort();
  return m;
}

ActivityMatrix edx_to_activity_matrix(const std::vector<EdxEvent>& events, const SessionWindow& window,
                                      const BoundaryConfig& config) {
  ActivityMatrix m{ActivitySource::Mooc, {}};
  std::optional<ActivityInterval> current;
  auto close_at = [&](TimestampMs t) {
    if (!current) return;
    current->t_end = std::max(current->t_start, t);
    m.intervals.push_back(std::move(*current));
    current.reset();
  };

  for (const auto& ev : events) {
    BoundaryRule rule = config.rule_for(ev.event_type);
    switch (rule.action) {
      case BoundaryAction::Ignored:
        break;
      case BoundaryAction::Closes:
        close_at(ev.time);
        break;
      case BoundaryAction::Opens: {
        auto label = expand_label(rule.label, ev.resource_id);
        if (current && label && current->activity_id == *label) break;
        close_at(ev.time);
        if (label) current = ActivityInterval{*label, ev.time, ev.time};
        break;
      }
    }
  }
  close_at(window.end);
  m.sort();
  return m;
}

ActivityMatrix merge_activity_matrices(const ActivityMatrix& logge, const ActivityMatrix& mooc) {
  std::set<std::string_view> mooc_ids;
  for (const auto& iv : mooc.intervals) mooc_ids.insert(iv.activity_id);

  ActivityMatrix merged{ActivitySource::Merged, {}};
  merged.intervals.reserve(logge.intervals.size() + mooc.intervals.size());
  for (const auto& iv : logge.intervals) {
    if (!mooc_ids.contains(iv.activity_id)) merged.intervals.push_back(iv);
  }
  merged.intervals.insert(merged.intervals.end(), mooc.intervals.begin(), mooc.intervals.end());
  merged.sort();
  return merged;
}

namespace {

// Scans intervals starting at or before `t_first` from the latest start
// backwards; the first match fixes the start, then equal starts are scanned
// for the smallest id.
template <typename Covers>
std::string latest_covering(const ActivityMatrix& matrix, TimestampMs t_first, Covers covers) {
  const auto& ivs = matrix.intervals;
  auto end = std::partition_point(ivs.begin(), ivs.end(), [&](const ActivityInterval& iv) { return iv.t_start <= t_first; });
  const ActivityInterval* best = nullptr;
  for (auto it = end; it != ivs.begin();) {
    --it;
    if (best && it->t_start != best->t_start) break;
    if (covers(*it)) best = &*it;
  }
  return best ? best->activity_id : std::string(kUnlabeled);
}

}  // namespace

std::string activity_at(const ActivityMatrix& matrix, TimestampMs t) {
  return latest_covering(matrix, t, [t](const ActivityInterval& iv) { return iv.t_end >= t; });
}

std::string activity_over(const ActivityMatrix& matrix, TimestampMs a, TimestampMs b) {
  return latest_covering(matrix, a, [b](const ActivityInterval& iv) { return iv.t_end >= b; });
}

LearnerMatrix build_learner_matrix(const WindowedSeries& series, const ActivityMatrix& merged) {
  const ActivityMatrix* lookup = &merged;
  ActivityMatrix sorted;
  if (!merged.is_sorted()) {
    sorted = merged;
    sorted.sort();
    lookup = &sorted;
  }
  LearnerMatrix lm{series.kind, {}};
  lm.rows.reserve(series.rows.size());
  for (const auto& row : series.rows) {
    lm.rows.push_back({row.t, row.value, row.window, activity_at(*lookup, row.t)});
  }
  return lm;
}

}  // namespace m2lads
