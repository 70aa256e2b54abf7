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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "m2lads/activity_matrix.hpp"
#include "m2lads/signal.hpp"

namespace m2lads {

inline constexpr TimestampMs kDefaultWindowMs = 30000;
inline constexpr TimestampMs kDefaultGridMs = 1000;

struct SessionWindow {
  TimestampMs start = 0;
  TimestampMs end = 0;

  TimestampMs length() const { return end - start; }
  bool contains(TimestampMs t) const { return start <= t && t <= end; }

  friend bool operator==(const SessionWindow&, const SessionWindow&) = default;
};

struct WindowedRow {
  TimestampMs t = 0;
  double value = 0.0;
  double window = 0.0;
  friend bool operator==(const WindowedRow&, const WindowedRow&) = default;
};

struct WindowedSeries {
  SignalKind kind = SignalKind::Attention;
  std::vector<WindowedRow> rows;
  friend bool operator==(const WindowedSeries&, const WindowedSeries&) = default;
};

struct GridPoint {
  TimestampMs t = 0;
  std::optional<double> value;  // nullopt when no sample precedes t
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct ResampledSeries {
  SignalKind kind = SignalKind::Attention;
  TimestampMs grid_step_ms = kDefaultGridMs;
  std::vector<GridPoint> points;
  friend bool operator==(const ResampledSeries&, const ResampledSeries&) = default;
};

/// Parses ISO-8601 date-times with an explicit zone ("Z", "+hh:mm", "+hhmm")
/// and optional fractional seconds (truncated to milliseconds).
TimestampMs normalize_timestamp(std::string_view iso);

/// Inverse of normalize_timestamp for UTC: "YYYY-MM-DDTHH:MM:SS[.mmm]Z".
std::string format_timestamp(TimestampMs t);

/// Common span of all series: (max of first timestamps, min of last).
SessionWindow session_window(std::span<const SignalSeries> series);

struct SyncResult {
  SessionWindow window;
  std::vector<SignalSeries> series;
  std::vector<ActivityMatrix> matrices;
};

/// Clips every series and activity matrix to the common session window.
/// Intervals lying entirely outside the window are dropped.
SyncResult synchronize(std::vector<SignalSeries> series, std::vector<ActivityMatrix> matrices);

ActivityMatrix clip_to_window(ActivityMatrix matrix, const SessionWindow& window);

/// Mean of the samples in the closed trailing interval [t - width_ms, t].
double window_average(const SignalSeries& series, TimestampMs t, TimestampMs width_ms = kDefaultWindowMs);

WindowedSeries annotate_windows(const SignalSeries& series, TimestampMs width_ms = kDefaultWindowMs);

/// Samples the trailing-window mean on the grid start + k * grid_step_ms.
/// Where the window holds no sample the last earlier sample is held; before
/// the first sample points are missing.
ResampledSeries resample(const SignalSeries& series, const SessionWindow& window, TimestampMs grid_step_ms,
                         TimestampMs width_ms = kDefaultWindowMs);

}  // namespace m2lads
