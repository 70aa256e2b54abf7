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

#include <string>
#include <string_view>
#include <vector>

#include "m2lads/signal.hpp"

namespace m2lads {

/// Id assigned to samples recorded outside every activity interval.
inline constexpr std::string_view kUnlabeled = "unlabeled";

struct ActivityInterval {
  std::string activity_id;
  TimestampMs t_start = 0;
  TimestampMs t_end = 0;
  friend bool operator==(const ActivityInterval&, const ActivityInterval&) = default;
};

enum class ActivitySource { Logge, Mooc, Merged };

std::string_view to_string(ActivitySource source);

/// Intervals are kept sorted by (t_start, activity_id, t_end).
struct ActivityMatrix {
  ActivitySource source = ActivitySource::Merged;
  std::vector<ActivityInterval> intervals;

  void sort();
  bool is_sorted() const;

  friend bool operator==(const ActivityMatrix&, const ActivityMatrix&) = default;
};

bool interval_less(const ActivityInterval& a, const ActivityInterval& b);

}  // namespace m2lads
