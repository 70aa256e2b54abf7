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

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "m2lads/activity_matrix.hpp"
#include "m2lads/ingest.hpp"
#include "m2lads/timeline.hpp"

namespace m2lads {

struct LearnerRow {
  TimestampMs t = 0;
  double value = 0.0;
  double window = 0.0;
  std::string activity_id;
  friend bool operator==(const LearnerRow&, const LearnerRow&) = default;
};

/// Per-signal table of (timestamp, value, trailing-window mean, activity).
struct LearnerMatrix {
  SignalKind kind = SignalKind::Attention;
  std::vector<LearnerRow> rows;
  friend bool operator==(const LearnerMatrix&, const LearnerMatrix&) = default;
};

enum class BoundaryAction { Opens, Closes, Ignored };

struct BoundaryRule {
  BoundaryAction action = BoundaryAction::Ignored;
  std::string label;  // Opens only; "{id}" expands to the event's resource id
  friend bool operator==(const BoundaryRule&, const BoundaryRule&) = default;
};

/// Maps MOOC event types onto activity boundaries. Unlisted types are ignored.
struct BoundaryConfig {
  std::map<std::string, BoundaryRule, std::less<>> event_types;

  static BoundaryConfig defaults();
  BoundaryRule rule_for(std::string_view event_type) const;

  friend bool operator==(const BoundaryConfig&, const BoundaryConfig&) = default;
};

/// JSON `{"event_types": {"play_video": {"action": "opens", "label": "video:{id}"}, ...}}`.
BoundaryConfig parse_boundary_config(std::istream& in);

/// Expands "{id}" in a label template; nullopt when the template needs an id
/// and none is available.
std::optional<std::string> expand_label(std::string_view label_template, const std::optional<std::string>& resource_id);

/// Pairs start/end markers per activity id first-in-first-out. Activities
/// still open at the end of the log close at window.end.
ActivityMatrix logge_to_activity_matrix(const std::vector<LoggeEvent>& events, const SessionWindow& window);

/// Boundary-event model: at most one MOOC activity is open at a time; an
/// opening event closes the previous one.
ActivityMatrix edx_to_activity_matrix(const std::vector<EdxEvent>& events, const SessionWindow& window,
                                      const BoundaryConfig& config);

/// Ids found in only one matrix keep their intervals; for ids found in both,
/// only the MOOC intervals are kept.
ActivityMatrix merge_activity_matrices(const ActivityMatrix& logge, const ActivityMatrix& mooc);

/// Activity in progress at t: the covering interval with the latest start,
/// then the smallest id; kUnlabeled when none covers t. `matrix` must be sorted.
std::string activity_at(const ActivityMatrix& matrix, TimestampMs t);

/// Activity in progress throughout the open span (a, b), where no interval
/// starts or ends strictly inside it.
std::string activity_over(const ActivityMatrix& matrix, TimestampMs a, TimestampMs b);

LearnerMatrix build_learner_matrix(const WindowedSeries& series, const ActivityMatrix& merged);

}  // namespace m2lads
