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
#include <vector>

#include "m2lads/activity.hpp"
#include "m2lads/ingest.hpp"
#include "m2lads/timeline.hpp"

namespace m2lads {

/// Symmetric matrix of Pearson coefficients in canonical kind order; a cell
/// is empty when a series is constant or fewer than two grid points are
/// shared.
struct CorrelationMatrix {
  std::vector<SignalKind> kinds;
  std::vector<std::vector<std::optional<double>>> r;
  friend bool operator==(const CorrelationMatrix&, const CorrelationMatrix&) = default;
};

struct PosttestMatrix {
  std::vector<ItemScore> rows;
  friend bool operator==(const PosttestMatrix&, const PosttestMatrix&) = default;
};

struct PerformanceRow {
  std::string item;
  std::optional<double> pre;
  std::optional<double> post;
  friend bool operator==(const PerformanceRow&, const PerformanceRow&) = default;
};

struct PerformanceReport {
  std::vector<PerformanceRow> per_item;
  double pre_mean = 0.0;
  double post_mean = 0.0;
  double gain = 0.0;
  friend bool operator==(const PerformanceReport&, const PerformanceReport&) = default;
};

struct ActivityStats {
  std::string activity_id;
  SignalKind kind = SignalKind::Attention;
  std::optional<double> mean;  // empty when no sample fell in the activity
  std::optional<double> min;
  std::optional<double> max;
  std::size_t sample_count = 0;
  double duration_share = 0.0;
  friend bool operator==(const ActivityStats&, const ActivityStats&) = default;
};

struct ActivitySummary {
  std::vector<ActivityStats> rows;
  friend bool operator==(const ActivitySummary&, const ActivitySummary&) = default;
};

/// Sample Pearson coefficient; nullopt when either input has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Pairwise-complete correlations over a shared resampling grid.
CorrelationMatrix correlation_matrix(std::span<const ResampledSeries> resampled);

/// Scores graded `problem_check` events as grade / max_grade; the last
/// attempt per item wins. Events without grade fields are skipped.
PosttestMatrix score_posttest(const std::vector<EdxEvent>& events);

PerformanceReport compare_performance(const PretestMatrix& pre, const PosttestMatrix& post);

/// Per-activity statistics of one learner matrix plus the share of the
/// window each activity occupies (including kUnlabeled gaps).
ActivitySummary summarize_by_activity(const LearnerMatrix& lm, const SessionWindow& window, const ActivityMatrix& merged);

}  // namespace m2lads
