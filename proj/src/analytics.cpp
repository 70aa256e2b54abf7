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

#include "m2lads/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "m2lads/csv.hpp"
#include "m2lads/error.hpp"

namespace m2lads {

namespace {

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double mean(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < 2) throw Error(ErrorCode::TooFewPoints, "need at least 2 points");
  // Exact constancy test; a computed variance can be a rounding residue.
  if (is_constant(x) || is_constant(y)) return std::nullopt;

  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(std::span<const ResampledSeries> resampled) {
  std::vector<const ResampledSeries*> ordered;
  for (const auto& s : resampled) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->kind < b->kind; });

  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const auto& s = *ordered[i];
    if (i > 0 && s.kind == ordered[i - 1]->kind) {
      throw Error(ErrorCode::InvalidArgument, "duplicate signal " + std::string(token_of(s.kind)));
    }
    const auto& ref = *ordered.front();
    bool same = s.grid_step_ms == ref.grid_step_ms && s.points.size() == ref.points.size() &&
                (s.points.empty() || s.points.front().t == ref.points.front().t);
    if (!same) {
      throw Error(ErrorCode::GridMismatch,
                  std::string(token_of(s.kind)) + " is not on the grid of " + std::string(token_of(ref.kind)));
    }
  }

  const std::size_t n = ordered.size();
  CorrelationMatrix out;
  out.r.assign(n, std::vector<std::optional<double>>(n));
  for (auto* s : ordered) out.kinds.push_back(s->kind);

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      xs.clear();
      ys.clear();
      const auto& a = ordered[i]->points;
      const auto& b = ordered[j]->points;
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].value && b[k].value) {
          xs.push_back(*a[k].value);
          ys.push_back(*b[k].value);
        }
      }
      std::optional<double> r;
      if (xs.size() >= 2) r = pearson(xs, ys);
      if (i == j && r) r = 1.0;
      out.r[i][j] = r;
      out.r[j][i] = r;
    }
  }
  return out;
}

PosttestMatrix score_posttest(const std::vector<EdxEvent>& events) {
  std::vector<std::string> order;
  std::map<std::string, double> last;
  for (const auto& ev : events) {
    if (ev.event_type != "problem_check" || !ev.resource_id) continue;
    auto grade_it = ev.payload.find("grade");
    auto max_it = ev.payload.find("max_grade");
    if (grade_it == ev.payload.end() || max_it == ev.payload.end()) continue;

    const std::string& item = *ev.resource_id;
    auto grade = csv::parse_real(grade_it->second);
    auto max_grade = csv::parse_real(max_it->second);
    if (!grade || !max_grade || !std::isfinite(*grade) || !std::isfinite(*max_grade) || *max_grade <= 0.0 ||
        *grade < 0.0 || *grade > *max_grade) {
      throw Error(ErrorCode::InvalidGrade, item + ": " + grade_it->second + "/" + max_it->second);
    }
    if (!last.contains(item)) order.push_back(item);
    last[item] = *grade / *max_grade;
  }
  PosttestMatrix out;
  for (const auto& item : order) out.rows.push_back({item, last[item]});
  return out;
}

PerformanceReport compare_performance(const PretestMatrix& pre, const PosttestMatrix& post) {
  PerformanceReport report;
  std::map<std::string, std::size_t> index;
  for (const auto& row : pre.rows) {
    index.emplace(row.item, report.per_item.size());
    report.per_item.push_back({row.item, row.score, std::nullopt});
  }
  for (const auto& row : post.rows) {
    auto it = index.find(row.item);
    if (it == index.end()) {
      index.emplace(row.item, report.per_item.size());
      report.per_item.push_back({row.item, std::nullopt, row.score});
    } else {
      report.per_item[it->second].post = row.score;
    }
  }
  auto mean_of = [](const auto& rows) {
    if (rows.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : rows) sum += r.score;
    return sum / static_cast<double>(rows.size());
  };
  report.pre_mean = mean_of(pre.rows);
  report.post_mean = mean_of(post.rows);
  report.gain = report.post_mean - report.pre_mean;
  return report;
}

ActivitySummary summarize_by_activity(const LearnerMatrix& lm, const SessionWindow& window, const ActivityMatrix& merged) {
  ActivitySummary summary;
  if (lm.rows.empty()) return summary;
  if (window.start >= window.end) throw Error(ErrorCode::InvalidArgument, "empty session window");

  ActivityMatrix sorted = merged;
  sorted.sort();

  struct Acc {
    double sum = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
    TimestampMs covered = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& row : lm.rows) {
    Acc& a = acc[row.activity_id];
    if (a.count == 0) {
      a.min = a.max = row.value;
    } else {
      a.min = std::min(a.min, row.value);
      a.max = std::max(a.max, row.value);
    }
    a.sum += row.value;
    ++a.count;
  }

  std::set<TimestampMs> cuts{window.start, window.end};
  for (const auto& iv : sorted.intervals) {
    if (window.start < iv.t_start && iv.t_start < window.end) cuts.insert(iv.t_start);
    if (window.start < iv.t_end && iv.t_end < window.end) cuts.insert(iv.t_end);
  }
  for (auto it = cuts.begin(), next = std::next(it); next != cuts.end(); ++it, ++next) {
    acc[activity_over(sorted, *it, *next)].covered += *next - *it;
  }

  const double length = static_cast<double>(window.length());
  for (const auto& [id, a] : acc) {
    ActivityStats row;
    row.activity_id = id;
    row.kind = lm.kind;
    row.sample_count = a.count;
    if (a.count > 0) {
      row.mean = a.sum / static_cast<double>(a.count);
      row.min = a.min;
      row.max = a.max;
    }
    row.duration_share = static_cast<double>(a.covered) / length;
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

}  // namespace m2lads
