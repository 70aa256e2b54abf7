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

#include <ctime>

#include <doctest.h>

#include "m2lads/error.hpp"
#include "m2lads/timeline.hpp"
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

SignalSeries series(std::vector<Sample> samples, SignalKind kind = SignalKind::HeartRate) {
  return SignalSeries{kind, std::move(samples)};
}

// Calendar conversion through the C library, independent of the parser.
TimestampMs via_timegm(int y, int mo, int d, int h, int mi, int s, int offset_minutes) {
  std::tm tm{};
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = s;
  return (static_cast<TimestampMs>(::timegm(&tm)) - offset_minutes * 60) * 1000;
}

}  // namespace

TEST_SUITE("normalize_timestamp") {
  TEST_CASE("documented examples") {
    CHECK(normalize_timestamp("1970-01-01T00:00:01Z") == 1000);
    CHECK(normalize_timestamp("1970-01-01T02:00:00+02:00") == via_timegm(1970, 1, 1, 2, 0, 0, 120));
    CHECK(normalize_timestamp("1970-01-01T02:00:00+02:00") == 0);
    CHECK(code_of([] { normalize_timestamp("not-a-date"); }) == ErrorCode::InvalidTimestamp);
  }

  TEST_CASE("zone and fraction forms") {
    CHECK(normalize_timestamp("2023-03-01T10:00:00.123456+00:00") == 1677664800123);
    CHECK(normalize_timestamp("2023-03-01T10:00:00,5Z") == 1677664800500);
    CHECK(normalize_timestamp("2023-03-01T12:30:00+0230") == 1677664800000);
    CHECK(normalize_timestamp("2023-03-01T05:00:00-05") == 1677664800000);
    CHECK(normalize_timestamp("2023-03-01 10:00:00Z") == 1677664800000);
    CHECK(normalize_timestamp("2024-02-29T00:00:00Z") == via_timegm(2024, 2, 29, 0, 0, 0, 0));
  }

  TEST_CASE("rejected inputs") {
    for (const char* bad : {"", "2023-03-01T10:00:00", "2023-02-30T00:00:00Z", "2023-13-01T00:00:00Z",
                            "2023-03-01T24:00:00Z", "2023-03-01T10:00:00+25:00", "2023-03-01T10:00:00Zjunk",
                            "1969-12-31T23:59:59Z", "2023-3-1T10:00:00Z"}) {
      CAPTURE(bad);
      CHECK(code_of([&] { normalize_timestamp(bad); }) == ErrorCode::InvalidTimestamp);
    }
  }

  TEST_CASE("property: agrees with timegm and round-trips through format_timestamp") {
    testing::Rng rng(21);
    for (int i = 0; i < 5000; ++i) {
      int y = static_cast<int>(rng.between(1971, 2099)), mo = static_cast<int>(rng.between(1, 12));
      int d = static_cast<int>(rng.between(1, 28)), h = static_cast<int>(rng.between(0, 23));
      int mi = static_cast<int>(rng.between(0, 59)), s = static_cast<int>(rng.between(0, 59));
      int off = static_cast<int>(rng.between(-12 * 60, 14 * 60));
      int ms = static_cast<int>(rng.between(0, 999));
      char buf[64];
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03d%c%02d:%02d", y, mo, d, h, mi, s, ms,
                    off < 0 ? '-' : '+', std::abs(off) / 60, std::abs(off) % 60);
      CAPTURE(buf);
      TimestampMs expected = via_timegm(y, mo, d, h, mi, s, off) + ms;
      CHECK(normalize_timestamp(buf) == expected);
      if (expected >= 0) CHECK(normalize_timestamp(format_timestamp(expected)) == expected);
    }
  }
}

TEST_SUITE("synchronize") {
  TEST_CASE("window is the intersection and outer samples are dropped") {
    std::vector<SignalSeries> in;
    in.push_back(series({{0, 1}, {5000, 2}, {10000, 3}, {50000, 4}, {90000, 5}, {95000, 6}, {100000, 7}}));
    in.push_back(series({{10000, 1}, {90000, 2}}, SignalKind::Attention));
    auto out = synchronize(in, {});
    CHECK(out.window == SessionWindow{10000, 90000});
    CHECK(out.series[0].samples == std::vector<Sample>{{10000, 3}, {50000, 4}, {90000, 5}});
    CHECK(out.series[1].samples == in[1].samples);
  }

  TEST_CASE("identical spans keep everything") {
    std::vector<SignalSeries> in{series({{0, 1}, {500, 2}, {1000, 3}}), series({{0, 9}, {1000, 8}})};
    auto out = synchronize(in, {});
    CHECK(out.window == SessionWindow{0, 1000});
    CHECK(out.series == in);
  }

  TEST_CASE("disjoint or touching streams have no overlap") {
    CHECK(code_of([] { synchronize({series({{0, 1}, {10000, 1}}), series({{20000, 1}, {30000, 1}})}, {}); }) ==
          ErrorCode::NoTemporalOverlap);
    CHECK(code_of([] { synchronize({series({{0, 1}, {10000, 1}}), series({{10000, 1}, {30000, 1}})}, {}); }) ==
          ErrorCode::NoTemporalOverlap);
    CHECK(code_of([] { synchronize({}, {}); }) == ErrorCode::EmptySeries);
    CHECK(code_of([] { synchronize({series({{0, 1}, {5, 1}}), series({})}, {}); }) == ErrorCode::EmptySeries);
  }

  TEST_CASE("activity intervals are clipped, outside ones dropped") {
    ActivityMatrix m;
    m.source = ActivitySource::Logge;
    m.intervals = {{"before", 0, 5000}, {"left", 5000, 20000}, {"inside", 30000, 40000}, {"right", 80000, 120000},
                   {"after", 95000, 99000}, {"spans", 0, 200000}};
    m.sort();
    auto out = synchronize({series({{10000, 1}, {90000, 1}})}, {m});
    REQUIRE(out.matrices.size() == 1);
    CHECK(out.matrices[0].source == ActivitySource::Logge);
    CHECK(testing::as_set(out.matrices[0]) ==
          testing::IntervalSet{{"left", 10000, 20000}, {"inside", 30000, 40000}, {"right", 80000, 90000},
                               {"spans", 10000, 90000}});
    CHECK(out.matrices[0].is_sorted());
  }

  TEST_CASE("property: window is (max first, min last) and survivors lie inside") {
    testing::Rng rng(8);
    int overlapping = 0;
    for (int round = 0; round < 300; ++round) {
      std::vector<SignalSeries> in;
      for (int k = 0, n = static_cast<int>(rng.between(1, 6)); k < n; ++k) {
        in.push_back(testing::random_series(rng, 300, kAllSignalKinds[static_cast<std::size_t>(k)],
                                            1'600'000'000'000 + rng.between(0, 200'000)));
      }
      TimestampMs first = INT64_MIN, last = INT64_MAX;
      for (const auto& s : in) {
        first = std::max(first, s.samples.front().t);
        last = std::min(last, s.samples.back().t);
      }
      if (first >= last) {
        CHECK(code_of([&] { synchronize(in, {}); }) == ErrorCode::NoTemporalOverlap);
        continue;
      }
      ++overlapping;
      auto out = synchronize(in, {});
      CHECK(out.window == SessionWindow{first, last});
      for (std::size_t k = 0; k < in.size(); ++k) {
        std::vector<Sample> expected;
        for (const auto& s : in[k].samples) {
          if (s.t >= first && s.t <= last) expected.push_back(s);
        }
        CHECK(out.series[k].samples == expected);
      }
    }
    CHECK(overlapping > 50);
  }
}

TEST_SUITE("window_average") {
  TEST_CASE("documented examples") {
    auto s = series({{0, 10}, {10000, 20}, {20000, 30}});
    CHECK(window_average(s, 20000) == 20.0);
    CHECK(window_average(series({{7, 4.5}}), 7) == 4.5);
    CHECK(window_average(series({{0, 100}, {31000, 50}}), 31000) == 50.0);
  }

  TEST_CASE("window edge is inclusive") {
    CHECK(window_average(series({{0, 100}, {30000, 50}}), 30000) == 75.0);
    CHECK(window_average(series({{0, 100}, {30000, 50}}), 30000, 29999) == 50.0);
  }

  TEST_CASE("empty window and bad width") {
    CHECK(code_of([] { window_average(series({{0, 1}}), 40000); }) == ErrorCode::EmptyWindow);
    CHECK(code_of([] { window_average(series({{100, 1}}), 50); }) == ErrorCode::EmptyWindow);
    CHECK(code_of([] { window_average(series({{0, 1}}), 0, 0); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("property: matches the brute-force filter at arbitrary instants") {
    testing::Rng rng(13);
    for (int round = 0; round < 200; ++round) {
      auto s = testing::random_series(rng, 400);
      TimestampMs width = rng.between(1, 60'000);
      for (int q = 0; q < 20; ++q) {
        TimestampMs t = rng.between(s.samples.front().t - 1000, s.samples.back().t + 70'000);
        auto expected = testing::brute_window_mean(s.samples, t, width);
        if (expected) {
          CHECK(window_average(s, t, width) == *expected);
        } else {
          CHECK(code_of([&] { window_average(s, t, width); }) == ErrorCode::EmptyWindow);
        }
      }
    }
  }
}

TEST_SUITE("annotate_windows") {
  TEST_CASE("documented examples") {
    auto one = annotate_windows(series({{0, 5}}));
    CHECK(one.rows == std::vector<WindowedRow>{{0, 5, 5}});
    auto two = annotate_windows(series({{0, 10}, {10000, 20}}));
    CHECK(two.rows == std::vector<WindowedRow>{{0, 10, 10}, {10000, 20, 15}});
  }

  TEST_CASE("property: equals the brute-force window exactly, rows preserved") {
    testing::Rng rng(17);
    for (int round = 0; round < 100; ++round) {
      auto s = testing::random_series(rng, 1500);
      auto w = annotate_windows(s);
      REQUIRE(w.rows.size() == s.samples.size());
      CHECK(w.kind == s.kind);
      for (std::size_t i = 0; i < w.rows.size(); ++i) {
        CHECK(w.rows[i].t == s.samples[i].t);
        CHECK(w.rows[i].value == s.samples[i].value);
        CHECK(w.rows[i].window == testing::brute_window_at(s.samples, i, kDefaultWindowMs));
      }
    }
  }
}

TEST_SUITE("resample") {
  TEST_CASE("samples on every grid point") {
    auto s = series({{0, 1}, {1000, 2}, {2000, 3}, {3000, 6}});
    auto r = resample(s, {0, 3000}, 1000, 1000);
    CHECK(r.grid_step_ms == 1000);
    CHECK(r.points == std::vector<GridPoint>{{0, 1.0}, {1000, 1.5}, {2000, 2.5}, {3000, 4.5}});
  }

  TEST_CASE("leading points before the first sample are missing") {
    auto s = series({{2500, 4}, {4000, 8}});
    auto r = resample(s, {0, 4000}, 1000);
    REQUIRE(r.points.size() == 5);
    CHECK_FALSE(r.points[0].value);
    CHECK_FALSE(r.points[2].value);
    CHECK(r.points[3].value == 4.0);
    CHECK(r.points[4].value == 6.0);
  }

  TEST_CASE("sample-and-hold across a gap longer than the window") {
    auto s = series({{0, 3}, {100000, 9}});
    auto r = resample(s, {0, 100000}, 50000, 30000);
    CHECK(r.points == std::vector<GridPoint>{{0, 3.0}, {50000, 3.0}, {100000, 9.0}});
  }

  TEST_CASE("grid step must be positive") {
    CHECK(code_of([] { resample(series({{0, 1}}), {0, 10}, 0); }) == ErrorCode::InvalidGridStep);
    CHECK(code_of([] { resample(series({{0, 1}}), {0, 10}, -5); }) == ErrorCode::InvalidGridStep);
  }

  TEST_CASE("property: matches the brute-force resampler, length formula holds") {
    testing::Rng rng(19);
    for (int round = 0; round < 150; ++round) {
      auto s = testing::random_series(rng, 300);
      SessionWindow w{s.samples.front().t - rng.between(0, 20'000), s.samples.back().t + rng.between(0, 20'000)};
      if (w.start == w.end) ++w.end;
      TimestampMs step = rng.between(1, 20'000);
      TimestampMs width = rng.between(1, 60'000);
      auto r = resample(s, w, step, width);
      CHECK(r.points.size() == static_cast<std::size_t>((w.end - w.start) / step + 1));
      CHECK(r.points == testing::brute_resample(s.samples, w, step, width));
    }
  }
}
