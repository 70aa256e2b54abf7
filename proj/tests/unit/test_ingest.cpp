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

#include "m2lads/csv.hpp"
#include "m2lads/error.hpp"
#include "m2lads/ingest.hpp"
#include "oracles.hpp"

using namespace m2lads;

namespace {

template <typename Fn>
Error capture(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an m2lads::Error");
  return Error(ErrorCode::IoError, "unreachable");
}

std::vector<EdxEvent> edx(const std::string& text) {
  std::istringstream in(text);
  return parse_edx_log(in);
}

std::vector<LoggeEvent> logge(const std::string& text) {
  std::istringstream in(text);
  return parse_logge_csv(in);
}

SignalSeries signal(const std::string& text, SignalKind kind = SignalKind::HeartRate) {
  std::istringstream in(text);
  return parse_signal_csv(in, kind);
}

EegExport eeg(const std::string& text) {
  std::istringstream in(text);
  return parse_eeg_csv(in);
}

PretestMatrix pretest(const std::string& answers, const std::string& key) {
  std::istringstream a(answers), k(key);
  return parse_pretest(a, k);
}

VideoFrameIndex frames(const std::string& text) {
  std::istringstream in(text);
  return parse_frame_index(in, "cam");
}

}  // namespace

TEST_SUITE("edx log") {
  TEST_CASE("maps the documented fields") {
    auto events = edx(R"({"username":"u1","event_type":"play_video","time":"1970-01-01T00:00:10Z","event":{"id":"v1"}})");
    REQUIRE(events.size() == 1);
    CHECK(events[0].username == "u1");
    CHECK(events[0].event_type == "play_video");
    CHECK(events[0].time == 10000);
    CHECK(events[0].resource_id == "v1");
    CHECK(events[0].payload.at("id") == "v1");
  }

  TEST_CASE("empty file gives no events") { CHECK(edx("").empty()); }

  TEST_CASE("truncated line is MalformedEvent at line 1") {
    auto e = capture([] { edx(R"({"username":)"); });
    CHECK(e.code() == ErrorCode::MalformedEvent);
    CHECK(e.line() == 1);
  }

  TEST_CASE("missing required field names the field and line") {
    auto e = capture([] {
      edx("{\"username\":\"u\",\"event_type\":\"x\",\"time\":\"1970-01-01T00:00:00Z\"}\n"
          "{\"username\":\"u\",\"time\":\"1970-01-01T00:00:00Z\"}\n");
    });
    CHECK(e.code() == ErrorCode::MissingField);
    CHECK(e.line() == 2);
    CHECK(e.detail() == "event_type");
  }

  TEST_CASE("bad time is reported with its line") {
    auto e = capture([] { edx(R"({"username":"u","event_type":"x","time":"yesterday"})"); });
    CHECK(e.code() == ErrorCode::InvalidTimestamp);
    CHECK(e.line() == 1);
  }

  TEST_CASE("string-encoded event body is decoded") {
    auto events = edx(R"({"username":"u","event_type":"pause_video","time":"2023-03-01T10:00:00.250+00:00","event":"{\"id\":\"v7\",\"currentTime\":12.5}"})");
    REQUIRE(events.size() == 1);
    CHECK(events[0].resource_id == "v7");
    CHECK(events[0].payload.at("currentTime") == "12.5");
    CHECK(events[0].time == 1677664800250);
  }

  TEST_CASE("unknown top-level fields are kept, missing resource id is null") {
    auto events = edx("\n{\"username\":\"u\",\"event_type\":\"page_close\",\"time\":\"1970-01-01T00:00:00Z\",\"ip\":\"10.0.0.1\",\"n\":3}\n\n");
    REQUIRE(events.size() == 1);
    CHECK_FALSE(events[0].resource_id.has_value());
    CHECK(events[0].extras.at("ip") == "10.0.0.1");
    CHECK(events[0].extras.at("n") == "3");
  }

  TEST_CASE("problem id is a resource id") {
    auto events = edx(R"({"username":"u","event_type":"problem_check","time":"1970-01-01T00:00:00Z","event":{"problem_id":"q3","grade":1,"max_grade":2}})");
    CHECK(events.at(0).resource_id == "q3");
    CHECK(events.at(0).payload.at("grade") == "1");
  }
}

TEST_SUITE("logge csv") {
  TEST_CASE("start and end rows") {
    auto events = logge("time,activity_id,marker\n1970-01-01T00:00:00Z,read_pdf,start\n1970-01-01T00:00:30Z,read_pdf,end\n");
    REQUIRE(events.size() == 2);
    CHECK(events[0] == LoggeEvent{0, "read_pdf", Marker::Start});
    CHECK(events[1] == LoggeEvent{30000, "read_pdf", Marker::End});
  }

  TEST_CASE("header only") { CHECK(logge("time,activity_id,marker\n").empty()); }

  TEST_CASE("unknown marker on the first data row") {
    auto e = capture([] { logge("time,activity_id,marker\n1970-01-01T00:00:00Z,read_pdf,pause\n"); });
    CHECK(e.code() == ErrorCode::UnknownMarker);
    CHECK(e.line() == 2);
  }

  TEST_CASE("wrong field count is MalformedRow") {
    auto e = capture([] { logge("time,activity_id,marker\r\n0,a,start\r\n5,a\r\n"); });
    CHECK(e.code() == ErrorCode::MalformedRow);
    CHECK(e.line() == 3);
  }

  TEST_CASE("wrong header") {
    auto e = capture([] { logge("timestamp,activity,marker\n"); });
    CHECK(e.code() == ErrorCode::InvalidHeader);
    CHECK(e.line() == 1);
  }

  TEST_CASE("epoch milliseconds and CRLF are accepted") {
    auto events = logge("time,activity_id,marker\r\n1500,\"a,b\",start\r\n");
    REQUIRE(events.size() == 1);
    CHECK(events[0] == LoggeEvent{1500, "a,b", Marker::Start});
  }

  TEST_CASE("write then parse reproduces the rows") {
    testing::Rng rng(11);
    for (int round = 0; round < 50; ++round) {
      std::vector<LoggeEvent> events;
      for (int i = 0, n = static_cast<int>(rng.between(0, 20)); i < n; ++i) {
        events.push_back({rng.between(0, 2'000'000'000'000), testing::random_name(rng) + (rng.chance(0.2) ? ", \"x\"" : ""),
                          rng.chance(0.5) ? Marker::Start : Marker::End});
      }
      std::stringstream buf;
      write_logge_csv(buf, events);
      CHECK(parse_logge_csv(buf) == events);
    }
  }
}

TEST_SUITE("signal csv") {
  TEST_CASE("two samples") {
    auto s = signal("t_ms,value\n0,72.0\n1000,75.0\n");
    CHECK(s.kind == SignalKind::HeartRate);
    CHECK(s.samples == std::vector<Sample>{{0, 72.0}, {1000, 75.0}});
  }

  TEST_CASE("decreasing timestamp") {
    auto e = capture([] { signal("t_ms,value\n1000,72.0\n500,75.0\n"); });
    CHECK(e.code() == ErrorCode::NonMonotonicTimestamps);
    CHECK(e.line() == 3);
  }

  TEST_CASE("repeated timestamp is not increasing") {
    auto e = capture([] { signal("t_ms,value\n1000,1\n1000,2\n"); });
    CHECK(e.code() == ErrorCode::NonMonotonicTimestamps);
  }

  TEST_CASE("header only is EmptySeries") {
    CHECK(capture([] { signal("t_ms,value\n"); }).code() == ErrorCode::EmptySeries);
  }

  TEST_CASE("non-finite values") {
    for (const char* v : {"nan", "inf", "-inf"}) {
      auto e = capture([&] { signal(std::string("t_ms,value\n0,1\n5,") + v + "\n"); });
      CHECK(e.code() == ErrorCode::NonFiniteValue);
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("garbage value is MalformedRow") {
    CHECK(capture([] { signal("t_ms,value\n0,abc\n"); }).code() == ErrorCode::MalformedRow);
    CHECK(capture([] { signal("t_ms,value\n-5,1\n"); }).code() == ErrorCode::MalformedRow);
  }

  TEST_CASE("write then parse is loss-free") {
    testing::Rng rng(5);
    for (int round = 0; round < 50; ++round) {
      auto s = testing::random_series(rng, 200, SignalKind::PupilDiameterLeft);
      for (auto& sample : s.samples) sample.value = testing::random_real(rng);
      std::stringstream buf;
      write_signal_csv(buf, s);
      CHECK(parse_signal_csv(buf, SignalKind::PupilDiameterLeft) == s);
    }
  }
}

TEST_SUITE("eeg csv") {
  const std::string kHeader = "t_ms,delta,theta,alpha,beta,gamma,attention,meditation,blink\n";

  TEST_CASE("single row with a blink") {
    auto out = eeg(kHeader + "500,1,2,3,4,5,60,40,1\n");
    CHECK(out.blinks.times == std::vector<TimestampMs>{500});
    for (std::size_t b = 0; b < 5; ++b) {
      CHECK(out.bands[b].samples == std::vector<Sample>{{500, static_cast<double>(b + 1)}});
      CHECK(out.bands[b].kind == eeg_kind(kAllEegBands[b]));
    }
    CHECK(out.attention.samples == std::vector<Sample>{{500, 60.0}});
    CHECK(out.meditation.samples == std::vector<Sample>{{500, 40.0}});
    CHECK(out.attention.kind == SignalKind::Attention);
    CHECK(out.meditation.kind == SignalKind::Meditation);
  }

  TEST_CASE("no blinks") {
    auto out = eeg(kHeader + "0,1,1,1,1,1,1,1,0\n1000,1,1,1,1,1,1,1,0\n2000,1,1,1,1,1,1,1,0\n");
    CHECK(out.blinks.times.empty());
    CHECK(out.attention.samples.size() == 3);
  }

  TEST_CASE("blink flag must be 0 or 1") {
    auto e = capture([&] { eeg(kHeader + "0,1,1,1,1,1,1,1,0\n1000,1,1,1,1,1,1,1,2\n"); });
    CHECK(e.code() == ErrorCode::InvalidBlinkFlag);
    CHECK(e.line() == 3);
  }

  TEST_CASE("signal errors apply") {
    CHECK(capture([&] { eeg(kHeader); }).code() == ErrorCode::EmptySeries);
    CHECK(capture([&] { eeg(kHeader + "5,1,1,1,1,1,1,1,0\n5,1,1,1,1,1,1,1,0\n"); }).code() ==
          ErrorCode::NonMonotonicTimestamps);
    CHECK(capture([&] { eeg(kHeader + "5,1,1,nan,1,1,1,1,0\n"); }).code() == ErrorCode::NonFiniteValue);
  }
}

TEST_SUITE("eeg bands") {
  TEST_CASE("documented examples") {
    CHECK(classify_band(9.5) == EegBand::Alpha);
    CHECK(classify_band(4.0) == EegBand::Theta);
    CHECK(classify_band(45.0) == EegBand::Gamma);
  }

  TEST_CASE("boundaries are half-open") {
    CHECK(classify_band(std::nextafter(4.0, 0.0)) == EegBand::Delta);
    CHECK(classify_band(8.0) == EegBand::Alpha);
    CHECK(classify_band(std::nextafter(8.0, 0.0)) == EegBand::Theta);
    CHECK(classify_band(13.0) == EegBand::Beta);
    CHECK(classify_band(30.0) == EegBand::Gamma);
    CHECK(classify_band(std::nextafter(30.0, 0.0)) == EegBand::Beta);
    CHECK(classify_band(1e-300) == EegBand::Delta);
    CHECK(classify_band(1e300) == EegBand::Gamma);
  }

  TEST_CASE("non-positive frequencies are rejected") {
    for (double f : {0.0, -1.0, std::nan("")}) {
      CHECK(capture([&] { classify_band(f); }).code() == ErrorCode::NonPositiveFrequency);
    }
  }

  TEST_CASE("property: bands partition the positive reals") {
    const double lo[] = {0.0, 4.0, 8.0, 13.0, 30.0};
    const double hi[] = {4.0, 8.0, 13.0, 30.0, INFINITY};
    testing::Rng rng(3);
    for (int i = 0; i < 20000; ++i) {
      double f = std::exp(rng.uniform(std::log(1e-3), std::log(1e3)));
      int hits = 0;
      for (std::size_t b = 0; b < 5; ++b) {
        if (f >= lo[b] && f < hi[b]) {
          ++hits;
          CHECK(classify_band(f) == kAllEegBands[b]);
        }
      }
      CHECK(hits == 1);
    }
  }
}

TEST_SUITE("pretest") {
  const std::string kHeader = "item,answer\n";

  TEST_CASE("match and mismatch") {
    CHECK(pretest(kHeader + "q1,b\n", kHeader + "q1,b\n").rows == std::vector<ItemScore>{{"q1", 1.0}});
    CHECK(pretest(kHeader + "q1,a\n", kHeader + "q1,b\n").rows == std::vector<ItemScore>{{"q1", 0.0}});
  }

  TEST_CASE("matching is case-sensitive") {
    CHECK(pretest(kHeader + "q1,B\n", kHeader + "q1,b\n").rows == std::vector<ItemScore>{{"q1", 0.0}});
  }

  TEST_CASE("unanswered key items are not scored") {
    auto m = pretest(kHeader + "q2,c\n", kHeader + "q1,a\nq2,c\nq3,d\n");
    CHECK(m.rows == std::vector<ItemScore>{{"q2", 1.0}});
  }

  TEST_CASE("unknown item") {
    auto e = capture([&] { pretest(kHeader + "q9,a\n", kHeader + "q1,b\n"); });
    CHECK(e.code() == ErrorCode::UnknownItem);
    CHECK(e.detail() == "q9");
  }

  TEST_CASE("duplicate item in answers or key") {
    CHECK(capture([&] { pretest(kHeader + "q1,a\nq1,b\n", kHeader + "q1,b\n"); }).code() == ErrorCode::DuplicateItem);
    CHECK(capture([&] { pretest(kHeader + "q1,a\n", kHeader + "q1,b\nq1,c\n"); }).code() == ErrorCode::DuplicateItem);
  }
}

TEST_SUITE("frame index") {
  TEST_CASE("two rows") {
    auto idx = frames("frame,t_ms\n0,0\n1,33\n");
    CHECK(idx.video_id == "cam");
    CHECK(idx.rows == std::vector<FrameStamp>{{0, 0}, {1, 33}});
  }

  TEST_CASE("decreasing frame numbers") {
    auto e = capture([] { frames("frame,t_ms\n1,33\n0,0\n"); });
    CHECK(e.code() == ErrorCode::NonMonotonicFrames);
    CHECK(e.line() == 3);
  }

  TEST_CASE("header only is valid") { CHECK(frames("frame,t_ms\n").rows.empty()); }

  TEST_CASE("equal timestamps are allowed, decreasing are not") {
    CHECK(frames("frame,t_ms\n0,10\n1,10\n").rows.size() == 2);
    CHECK(capture([] { frames("frame,t_ms\n0,10\n1,9\n"); }).code() == ErrorCode::NonMonotonicFrames);
  }

  TEST_CASE("malformed row") {
    auto e = capture([] { frames("frame,t_ms\n0,0\nx,1\n"); });
    CHECK(e.code() == ErrorCode::MalformedRow);
    CHECK(e.line() == 3);
  }
}

TEST_SUITE("learner profile") {
  TEST_CASE("attributes are strings") {
    std::istringstream in(R"({"learner_id":"u7","attributes":{"sex":"F","marks":"8","age":23}})");
    auto p = parse_learner_profile(in);
    CHECK(p.learner_id == "u7");
    CHECK(p.attributes.at("sex") == "F");
    CHECK(p.attributes.at("age") == "23");
  }

  TEST_CASE("learner id is required") {
    std::istringstream in(R"({"attributes":{}})");
    CHECK(capture([&] { parse_learner_profile(in); }).code() == ErrorCode::InvalidProfile);
  }
}

TEST_SUITE("csv dialect") {
  TEST_CASE("quoted fields may hold delimiters, quotes and newlines") {
    std::istringstream in("a,b\n\"x,1\",\"say \"\"hi\"\"\"\n\"multi\nline\",2\n");
    csv::Reader reader(in);
    reader.expect_header({"a", "b"});
    auto r1 = reader.next();
    REQUIRE(r1);
    CHECK(r1->line == 2);
    CHECK(r1->fields == std::vector<std::string>{"x,1", "say \"hi\""});
    auto r2 = reader.next();
    REQUIRE(r2);
    CHECK(r2->line == 3);
    CHECK(r2->fields == std::vector<std::string>{"multi\nline", "2"});
    CHECK_FALSE(reader.next());
  }

  TEST_CASE("byte order mark is ignored") {
    auto s = signal("\xEF\xBB\xBFt_ms,value\n0,1\n");
    CHECK(s.samples.size() == 1);
  }

  TEST_CASE("escape quotes only when needed") {
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::escape("q\"") == "\"q\"\"\"");
  }

  TEST_CASE("format_real is the shortest round trip") {
    CHECK(csv::format_real(0.1) == "0.1");
    CHECK(csv::format_real(72.0) == "72");
    testing::Rng rng(9);
    for (int i = 0; i < 10000; ++i) {
      double v = testing::random_real(rng);
      CHECK(csv::parse_real(csv::format_real(v)) == v);
    }
  }
}
