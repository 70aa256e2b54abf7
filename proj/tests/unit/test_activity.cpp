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

#include <sstream>

#include <doctest.h>

#include "m2lads/activity.hpp"
#include "m2lads/error.hpp"
#include "oracles.hpp"

using namespace m2lads;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an m2lads::Error");
  return ErrorCode::IoError;
}

ActivityMatrix matrix(ActivitySource source, std::vector<ActivityInterval> intervals) {
  ActivityMatrix m{source, std::move(intervals)};
  m.sort();
  return m;
}

EdxEvent edx(std::string type, TimestampMs t, std::optional<std::string> id = std::nullopt) {
  EdxEvent e;
  e.username = "u1";
  e.event_type = std::move(type);
  e.time = t;
  e.resource_id = std::move(id);
  return e;
}

BoundaryConfig config_from(const std::string& text) {
  std::istringstream in(text);
  return parse_boundary_config(in);
}

}  // namespace

TEST_SUITE("logge matrix") {
  const SessionWindow kWindow{0, 30000};

  TEST_CASE("paired markers") {
    auto m = logge_to_activity_matrix({{0, "A", Marker::Start}, {10000, "A", Marker::End}}, kWindow);
    CHECK(m.source == ActivitySource::Logge);
    CHECK(m.intervals == std::vector<ActivityInterval>{{"A", 0, 10000}});
  }

  TEST_CASE("unmatched start closes at window end") {
    auto m = logge_to_activity_matrix({{0, "A", Marker::Start}}, kWindow);
    CHECK(m.intervals == std::vector<ActivityInterval>{{"A", 0, 30000}});
  }

  TEST_CASE("end without start") {
    CHECK(code_of([&] { logge_to_activity_matrix({{5000, "A", Marker::End}}, kWindow); }) == ErrorCode::EndWithoutStart);
    CHECK(code_of([&] {
            logge_to_activity_matrix({{0, "A", Marker::Start}, {1, "A", Marker::End}, {2, "A", Marker::End}}, kWindow);
          }) == ErrorCode::EndWithoutStart);
  }

  TEST_CASE("pairing is first-in-first-out per id") {
    auto m = logge_to_activity_matrix({{0, "A", Marker::Start},
                                       {100, "B", Marker::Start},
                                       {200, "A", Marker::Start},
                                       {300, "A", Marker::End},
                                       {400, "B", Marker::End},
                                       {500, "A", Marker::End}},
                                      kWindow);
    CHECK(m.intervals == std::vector<ActivityInterval>{{"A", 0, 300}, {"B", 100, 400}, {"A", 200, 500}});
  }

  TEST_CASE("start after the window end still yields a valid interval") {
    auto m = logge_to_activity_matrix({{40000, "late", Marker::Start}}, kWindow);
    CHECK(m.intervals == std::vector<ActivityInterval>{{"late", 40000, 40000}});
  }
}

TEST_SUITE("mooc matrix") {
  const SessionWindow kWindow{0, 100000};

  TEST_CASE("play then pause") {
    auto m = edx_to_activity_matrix({edx("play_video", 10000, "v1"), edx("pause_video", 50000, "v1")}, kWindow,
                                    config_from(R"({"event_types":{"play_video":{"action":"opens","label":"video:{id}"},
                                                                   "pause_video":{"action":"closes"}}})"));
    CHECK(m.source == ActivitySource::Mooc);
    CHECK(m.intervals == std::vector<ActivityInterval>{{"video:v1", 10000, 50000}});
  }

  TEST_CASE("dangling open closes at window end") {
    auto cfg = config_from(R"({"event_types":{"page_load":{"action":"opens","label":"page:{id}"}}})");
    auto m = edx_to_activity_matrix({edx("page_load", 0, "p1")}, kWindow, cfg);
    CHECK(m.intervals == std::vector<ActivityInterval>{{"page:p1", 0, 100000}});
  }

  TEST_CASE("no events") { CHECK(edx_to_activity_matrix({}, kWindow, BoundaryConfig::defaults()).intervals.empty()); }

  TEST_CASE("an open closes the previous activity") {
    auto m = edx_to_activity_matrix(
        {edx("play_video", 0, "v1"), edx("seq_goto", 20000, "s2"), edx("play_video", 30000, "v2"), edx("page_close", 45000)},
        kWindow, BoundaryConfig::defaults());
    CHECK(m.intervals ==
          std::vector<ActivityInterval>{{"video:v1", 0, 20000}, {"sequence:s2", 20000, 30000}, {"video:v2", 30000, 45000}});
  }

  TEST_CASE("ignored and unmapped events do nothing") {
    auto m = edx_to_activity_matrix({edx("play_video", 0, "v1"), edx("problem_check", 1000, "q1"),
                                     edx("textbook.pdf.page.navigated", 2000, "x"), edx("pause_video", 3000, "v1")},
                                    kWindow, BoundaryConfig::defaults());
    CHECK(m.intervals == std::vector<ActivityInterval>{{"video:v1", 0, 3000}});
  }

  TEST_CASE("re-opening the running activity keeps one interval") {
    auto m = edx_to_activity_matrix({edx("play_video", 0, "v1"), edx("play_video", 5000, "v1"), edx("pause_video", 9000)},
                                    kWindow, BoundaryConfig::defaults());
    CHECK(m.intervals == std::vector<ActivityInterval>{{"video:v1", 0, 9000}});
  }

  TEST_CASE("an open without a resource id only closes") {
    auto m = edx_to_activity_matrix({edx("play_video", 0, "v1"), edx("play_video", 5000)}, kWindow,
                                    BoundaryConfig::defaults());
    CHECK(m.intervals == std::vector<ActivityInterval>{{"video:v1", 0, 5000}});
  }

  TEST_CASE("a close with nothing open is harmless") {
    auto m = edx_to_activity_matrix({edx("pause_video", 0), edx("play_video", 10, "v"), edx("pause_video", 20),
                                     edx("stop_video", 30)},
                                    kWindow, BoundaryConfig::defaults());
    CHECK(m.intervals == std::vector<ActivityInterval>{{"video:v", 10, 20}});
  }

  TEST_CASE("boundary config parsing") {
    auto cfg = config_from(R"({"event_types":{"a":{"action":"opens","label":"x:{id}:{id}"},"b":{"action":"closes"},
                                               "c":{"action":"ignored"}}})");
    CHECK(cfg.rule_for("a") == BoundaryRule{BoundaryAction::Opens, "x:{id}:{id}"});
    CHECK(cfg.rule_for("b").action == BoundaryAction::Closes);
    CHECK(cfg.rule_for("c").action == BoundaryAction::Ignored);
    CHECK(cfg.rule_for("zzz").action == BoundaryAction::Ignored);
    CHECK(expand_label("x:{id}:{id}", std::string("7")) == "x:7:7");
    CHECK(expand_label("static", std::nullopt) == "static");
    CHECK_FALSE(expand_label("v:{id}", std::nullopt));
  }

  TEST_CASE("invalid boundary configs") {
    for (const char* bad : {"[]", "{}", R"({"event_types":[]})", R"({"event_types":{"a":{"action":"toggles"}}})",
                            R"({"event_types":{"a":{"action":"opens"}}})", R"({"event_types":{"a":"opens"}})", "{"}) {
      CAPTURE(bad);
      CHECK(code_of([&] { config_from(bad); }) == ErrorCode::InvalidConfig);
    }
  }
}

TEST_SUITE("merge") {
  TEST_CASE("documented examples") {
    auto logge = matrix(ActivitySource::Logge, {{"A", 0, 10000}});
    auto empty_mooc = matrix(ActivitySource::Mooc, {});
    auto merged = merge_activity_matrices(logge, empty_mooc);
    CHECK(merged.source == ActivitySource::Merged);
    CHECK(merged.intervals == std::vector<ActivityInterval>{{"A", 0, 10000}});

    auto mooc = matrix(ActivitySource::Mooc, {{"A", 2000, 12000}});
    CHECK(merge_activity_matrices(logge, mooc).intervals == std::vector<ActivityInterval>{{"A", 2000, 12000}});
    CHECK(merge_activity_matrices(matrix(ActivitySource::Logge, {}), empty_mooc).intervals.empty());
  }

  TEST_CASE("presence is by id, not overlap") {
    auto logge = matrix(ActivitySource::Logge, {{"A", 0, 100}, {"A", 500, 600}, {"B", 0, 1000}});
    auto mooc = matrix(ActivitySource::Mooc, {{"A", 5000, 6000}, {"C", 50, 60}});
    auto merged = merge_activity_matrices(logge, mooc);
    CHECK(merged.intervals ==
          std::vector<ActivityInterval>{{"B", 0, 1000}, {"C", 50, 60}, {"A", 5000, 6000}});
  }

  TEST_CASE("property: equals the set-logic oracle, output sorted, id union preserved") {
    testing::Rng rng(23);
    for (int round = 0; round < 300; ++round) {
      auto logge = testing::random_matrix(rng, ActivitySource::Logge, 20, 80);
      auto mooc = testing::random_matrix(rng, ActivitySource::Mooc, 20, 80);
      auto merged = merge_activity_matrices(logge, mooc);
      CHECK(testing::as_set(merged) == testing::brute_merge(logge, mooc));
      CHECK(merged.is_sorted());

      std::set<std::string> ids, merged_ids;
      for (const auto* m : {&logge, &mooc}) {
        for (const auto& iv : m->intervals) ids.insert(iv.activity_id);
      }
      for (const auto& iv : merged.intervals) merged_ids.insert(iv.activity_id);
      CHECK(ids == merged_ids);

      // Merging again against the same MOOC matrix changes nothing.
      CHECK(merge_activity_matrices(merged, mooc) == merged);
    }
  }
}

TEST_SUITE("activity_at") {
  TEST_CASE("documented examples") {
    CHECK(activity_at(matrix(ActivitySource::Merged, {{"A", 0, 20000}}), 5000) == "A");
    CHECK(activity_at(matrix(ActivitySource::Merged, {{"A", 0, 20000}, {"B", 10000, 30000}}), 15000) == "B");
    CHECK(activity_at(matrix(ActivitySource::Merged, {}), 5000) == "unlabeled");
  }

  TEST_CASE("endpoints are inclusive, ties go to the smaller id") {
    auto m = matrix(ActivitySource::Merged, {{"b", 0, 100}, {"a", 0, 50}, {"c", 100, 200}});
    CHECK(activity_at(m, 0) == "a");
    CHECK(activity_at(m, 50) == "a");
    CHECK(activity_at(m, 51) == "b");
    CHECK(activity_at(m, 100) == "c");
    CHECK(activity_at(m, 200) == "c");
    CHECK(activity_at(m, 201) == "unlabeled");
    CHECK(activity_at(m, -1) == "unlabeled");
  }

  TEST_CASE("a long early interval is found behind short later ones") {
    auto m = matrix(ActivitySource::Merged, {{"long", 0, 1000}, {"x", 10, 20}, {"y", 30, 40}, {"z", 50, 60}});
    CHECK(activity_at(m, 500) == "long");
    CHECK(activity_at(m, 35) == "y");
  }

  TEST_CASE("property: brute-force agreement and independence from input order") {
    testing::Rng rng(29);
    for (int round = 0; round < 300; ++round) {
      auto m = testing::random_matrix(rng, ActivitySource::Merged, 6, 40, 10'000);
      auto shuffled = m;
      std::shuffle(shuffled.intervals.begin(), shuffled.intervals.end(), rng.engine());
      shuffled.sort();
      for (int q = 0; q < 50; ++q) {
        TimestampMs t = rng.between(-100, 10'100);
        auto expected = testing::brute_activity_at(m.intervals, t);
        CHECK(activity_at(m, t) == expected);
        CHECK(activity_at(shuffled, t) == expected);
      }
    }
  }
}

TEST_SUITE("learner matrix") {
  TEST_CASE("documented examples") {
    auto m = matrix(ActivitySource::Merged, {{"A", 0, 10000}});
    WindowedSeries ws{SignalKind::Attention, {{5000, 42, 42}, {15000, 42, 42}}};
    auto lm = build_learner_matrix(ws, m);
    CHECK(lm.kind == SignalKind::Attention);
    CHECK(lm.rows == std::vector<LearnerRow>{{5000, 42, 42, "A"}, {15000, 42, 42, "unlabeled"}});
  }

  TEST_CASE("unsorted matrix is accepted") {
    ActivityMatrix m{ActivitySource::Merged, {{"B", 10, 20}, {"A", 0, 30}}};
    WindowedSeries ws{SignalKind::HeartRate, {{15, 1, 1}, {25, 2, 2}}};
    CHECK(build_learner_matrix(ws, m).rows == std::vector<LearnerRow>{{15, 1, 1, "B"}, {25, 2, 2, "A"}});
  }

  TEST_CASE("property: per-row brute-force lookup, rows otherwise copied") {
    testing::Rng rng(31);
    for (int round = 0; round < 100; ++round) {
      auto s = testing::random_series(rng, 500, SignalKind::Meditation, 0);
      auto ws = annotate_windows(s);
      auto m = testing::random_matrix(rng, ActivitySource::Merged, 10, 60, s.samples.back().t + 1000);
      auto lm = build_learner_matrix(ws, m);
      REQUIRE(lm.rows.size() == ws.rows.size());
      for (std::size_t i = 0; i < lm.rows.size(); ++i) {
        CHECK(lm.rows[i].t == ws.rows[i].t);
        CHECK(lm.rows[i].value == ws.rows[i].value);
        CHECK(lm.rows[i].window == ws.rows[i].window);
        CHECK(lm.rows[i].activity_id == testing::brute_activity_at(m.intervals, ws.rows[i].t));
      }
    }
  }
}
