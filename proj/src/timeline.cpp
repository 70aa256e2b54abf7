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

#include "m2lads/timeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>

#include "m2lads/error.hpp"

namespace m2lads {

namespace {

class IsoCursor {
 public:
  explicit IsoCursor(std::string_view s) : s_(s) {}

  int digits(std::size_t n) {
    if (pos_ + n > s_.size()) fail();
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      char c = s_[pos_ + i];
      if (c < '0' || c > '9') fail();
      v = v * 10 + (c - '0');
    }
    pos_ += n;
    return v;
  }

  void expect(char c) {
    if (!accept(c)) fail();
  }

  bool accept(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool at_digit() const { return pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9'; }
  bool done() const { return pos_ == s_.size(); }

  [[noreturn]] void fail() const {
    throw Error(ErrorCode::InvalidTimestamp, "not an ISO-8601 date-time with zone: '" + std::string(s_) + "'");
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

TimestampMs floor_div(TimestampMs a, TimestampMs b) {
  TimestampMs q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

TimestampMs normalize_timestamp(std::string_view iso) {
  using namespace std::chrono;
  IsoCursor cur(iso);
  int y = cur.digits(4);
  cur.expect('-');
  int mo = cur.digits(2);
  cur.expect('-');
  int d = cur.digits(2);
  if (!(cur.accept('T') || cur.accept('t') || cur.accept(' '))) cur.fail();
  int hh = cur.digits(2);
  cur.expect(':');
  int mm = cur.digits(2);
  cur.expect(':');
  int ss = cur.digits(2);
  TimestampMs frac_ms = 0;
  if (cur.accept('.') || cur.accept(',')) {
    if (!cur.at_digit()) cur.fail();
    int scale = 100;
    while (cur.at_digit()) {
      int digit = cur.digits(1);
      frac_ms += digit * scale;
      scale /= 10;
    }
  }
  TimestampMs offset_min = 0;
  if (!(cur.accept('Z') || cur.accept('z'))) {
    int sign = 0;
    if (cur.accept('+')) sign = 1;
    else if (cur.accept('-')) sign = -1;
    else cur.fail();
    int oh = cur.digits(2);
    int om = 0;
    if (cur.accept(':')) om = cur.digits(2);
    else if (cur.at_digit()) om = cur.digits(2);
    if (oh > 23 || om > 59) cur.fail();
    offset_min = sign * (oh * 60 + om);
  }
  if (!cur.done()) cur.fail();

  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59) cur.fail();

  TimestampMs days = sys_days(ymd).time_since_epoch().count();
  TimestampMs seconds = ((days * 24 + hh) * 60 + mm) * 60 + ss - offset_min * 60;
  TimestampMs ms = seconds * 1000 + frac_ms;
  if (ms < 0) throw Error(ErrorCode::InvalidTimestamp, "date-time precedes the Unix epoch: '" + std::string(iso) + "'");
  return ms;
}

std::string format_timestamp(TimestampMs t) {
  using namespace std::chrono;
  TimestampMs days = floor_div(t, 86'400'000);
  TimestampMs rem = t - days * 86'400'000;
  year_month_day ymd{sys_days{std::chrono::days{days}}};
  int hh = static_cast<int>(rem / 3'600'000);
  int mm = static_cast<int>(rem / 60'000 % 60);
  int ss = static_cast<int>(rem / 1000 % 60);
  int ms = static_cast<int>(rem % 1000);
  char buf[40];
  if (ms == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hh, mm, ss);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hh, mm, ss, ms);
  }
  return buf;
}

SessionWindow session_window(std::span<const SignalSeries> series) {
  if (series.empty()) throw Error(ErrorCode::EmptySeries, "no series to synchronize");
  SessionWindow w{std::numeric_limits<TimestampMs>::min(), std::numeric_limits<TimestampMs>::max()};
  for (const auto& s : series) {
    if (s.samples.empty()) throw Error(ErrorCode::EmptySeries, std::string(token_of(s.kind)));
    w.start = std::max(w.start, s.samples.front().t);
    w.end = std::min(w.end, s.samples.back().t);
  }
  if (w.start >= w.end) {
    throw Error(ErrorCode::NoTemporalOverlap,
                "latest start " + std::to_string(w.start) + " >= earliest end " + std::to_string(w.end));
  }
  return w;
}

ActivityMatrix clip_to_window(ActivityMatrix matrix, const SessionWindow& window) {
  std::vector<ActivityInterval> kept;
  kept.reserve(matrix.intervals.size());
  for (auto& iv : matrix.intervals) {
    if (iv.t_end < window.start || iv.t_start > window.end) continue;
    iv.t_start = std::max(iv.t_start, window.start);
    iv.t_end = std::min(iv.t_end, window.end);
    kept.push_back(std::move(iv));
  }
  matrix.intervals = std::move(kept);
  matrix.sort();
  return matrix;
}

SyncResult synchronize(std::vector<SignalSeries> series, std::vector<ActivityMatrix> matrices) {
  SyncResult out;
  out.window = session_window(series);
  for (auto& s : series) {
    std::erase_if(s.samples, [&](const Sample& x) { return !out.window.contains(x.t); });
  }
  out.series = std::move(series);
  out.matrices.reserve(matrices.size());
  for (auto& m : matrices) out.matrices.push_back(clip_to_window(std::move(m), out.window));
  return out;
}

namespace {

void check_width(TimestampMs width_ms) {
  if (width_ms <= 0) throw Error(ErrorCode::InvalidArgument, "window width must be positive");
}

auto first_at_or_after(const std::vector<Sample>& samples, TimestampMs t) {
  return std::lower_bound(samples.begin(), samples.end(), t, [](const Sample& s, TimestampMs v) { return s.t < v; });
}

auto first_after(const std::vector<Sample>& samples, TimestampMs t) {
  return std::upper_bound(samples.begin(), samples.end(), t, [](TimestampMs v, const Sample& s) { return v < s.t; });
}

// Left-to-right sum so results match a direct filter-then-average exactly.
double mean_of(std::vector<Sample>::const_iterator first, std::vector<Sample>::const_iterator last) {
  double sum = 0.0;
  std::size_t n = 0;
  for (; first != last; ++first, ++n) sum += first->value;
  return sum / static_cast<double>(n);
}

}  // namespace

double window_average(const SignalSeries& series, TimestampMs t, TimestampMs width_ms) {
  check_width(width_ms);
  auto lo = first_at_or_after(series.samples, t - width_ms);
  auto hi = first_after(series.samples, t);
  if (lo >= hi) throw Error(ErrorCode::EmptyWindow, "no sample in [" + std::to_string(t - width_ms) + ", " +
                                                        std::to_string(t) + "]");
  return mean_of(lo, hi);
}

WindowedSeries annotate_windows(const SignalSeries& series, TimestampMs width_ms) {
  check_width(width_ms);
  WindowedSeries out;
  out.kind = series.kind;
  out.rows.reserve(series.samples.size());
  auto lo = series.samples.begin();
  for (auto it = series.samples.begin(); it != series.samples.end(); ++it) {
    while (lo->t < it->t - width_ms) ++lo;
    out.rows.push_back({it->t, it->value, mean_of(lo, it + 1)});
  }
  return out;
}

ResampledSeries resample(const SignalSeries& series, const SessionWindow& window, TimestampMs grid_step_ms,
                         TimestampMs width_ms) {
  if (grid_step_ms <= 0) throw Error(ErrorCode::InvalidGridStep, "grid step must be positive");
  check_width(width_ms);
  if (window.start > window.end) throw Error(ErrorCode::InvalidArgument, "window start after end");

  ResampledSeries out;
  out.kind = series.kind;
  out.grid_step_ms = grid_step_ms;
  const TimestampMs count = (window.end - window.start) / grid_step_ms + 1;
  out.points.reserve(static_cast<std::size_t>(count));
  const auto& samples = series.samples;
  for (TimestampMs k = 0; k < count; ++k) {
    TimestampMs t = window.start + k * grid_step_ms;
    auto lo = first_at_or_after(samples, t - width_ms);
    auto hi = first_after(samples, t);
    GridPoint p{t, std::nullopt};
    if (lo < hi) {
      p.value = mean_of(lo, hi);
    } else if (lo != samples.begin()) {
      p.value = std::prev(lo)->value;
    }
    out.points.push_back(p);
  }
  return out;
}

}  // namespace m2lads
