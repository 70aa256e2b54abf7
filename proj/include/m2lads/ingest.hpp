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

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "m2lads/signal.hpp"

namespace m2lads {

/// One tracking-log event from the MOOC platform.
struct EdxEvent {
  std::string username;
  std::string event_type;
  TimestampMs time = 0;
  std::optional<std::string> resource_id;
  /// Fields of the `event` body; non-string values hold their JSON text.
  std::map<std::string, std::string> payload;
  /// Unrecognized top-level fields, JSON text.
  std::map<std::string, std::string> extras;

  friend bool operator==(const EdxEvent&, const EdxEvent&) = default;
};

enum class Marker { Start, End };

struct LoggeEvent {
  TimestampMs time = 0;
  std::string activity_id;
  Marker marker = Marker::Start;
  friend bool operator==(const LoggeEvent&, const LoggeEvent&) = default;
};

struct ItemScore {
  std::string item;
  double score = 0.0;
  friend bool operator==(const ItemScore&, const ItemScore&) = default;
};

struct PretestMatrix {
  std::vector<ItemScore> rows;
  friend bool operator==(const PretestMatrix&, const PretestMatrix&) = default;
};

struct FrameStamp {
  std::int64_t frame_no = 0;
  TimestampMs t = 0;
  friend bool operator==(const FrameStamp&, const FrameStamp&) = default;
};

struct VideoFrameIndex {
  std::string video_id;
  std::vector<FrameStamp> rows;
  friend bool operator==(const VideoFrameIndex&, const VideoFrameIndex&) = default;
};

struct LearnerProfile {
  std::string learner_id;
  std::map<std::string, std::string> attributes;
  friend bool operator==(const LearnerProfile&, const LearnerProfile&) = default;
};

/// Contents of one headset export: five band-power series, the derived
/// attention and meditation scores, and blink instants.
struct EegExport {
  std::array<SignalSeries, 5> bands;  // indexed in EegBand order
  SignalSeries attention;
  SignalSeries meditation;
  BlinkEvents blinks;
};

/// Newline-delimited JSON, one event object per line. Blank lines are skipped.
std::vector<EdxEvent> parse_edx_log(std::istream& in);

/// CSV `time,activity_id,marker`; time is ISO-8601 or integer epoch ms.
std::vector<LoggeEvent> parse_logge_csv(std::istream& in);

/// CSV `t_ms,value`.
SignalSeries parse_signal_csv(std::istream& in, SignalKind kind);

/// CSV `t_ms,delta,theta,alpha,beta,gamma,attention,meditation,blink`.
EegExport parse_eeg_csv(std::istream& in);

/// Grades the learner's `item,answer` CSV against the answer key.
PretestMatrix parse_pretest(std::istream& answers, std::istream& key);

/// CSV `frame,t_ms`. An index without rows is valid.
VideoFrameIndex parse_frame_index(std::istream& in, std::string video_id);

/// JSON object `{"learner_id": ..., "attributes": {...}}`.
LearnerProfile parse_learner_profile(std::istream& in);

/// Writers producing the same formats the parsers accept.
void write_logge_csv(std::ostream& out, const std::vector<LoggeEvent>& events);
void write_signal_csv(std::ostream& out, const SignalSeries& series);

}  // namespace m2lads
