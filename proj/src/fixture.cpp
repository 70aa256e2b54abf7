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

#include "m2lads/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

#include <json.hpp>

#include "m2lads/error.hpp"
#include "m2lads/timeline.hpp"

namespace m2lads::fixture {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Engine output is specified by the standard; distributions are not, so
// values are derived from raw draws to stay identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool chance(double p) { return uniform() < p; }
  int below(int n) { return static_cast<int>(uniform() * n); }

 private:
  std::mt19937_64 engine_;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string edx_time(std::int64_t t) {
  std::string iso = format_timestamp(t);
  iso.pop_back();  // 'Z'
  return iso + "+00:00";
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

struct EdxLine {
  std::int64_t t;
  json doc;
};

}  // namespace

GeneratedSession write_session(const fs::path& dir, const SessionSpec& spec) {
  if (spec.minutes < 1 || spec.activities < 2 || spec.items < 1) {
    throw Error(ErrorCode::InvalidArgument, "fixture needs >= 1 minute, >= 2 activities, >= 1 item");
  }
  fs::create_directories(dir);
  Rng rng(spec.seed);
  const std::int64_t t0 = spec.start_ms;
  const std::int64_t duration = std::int64_t{spec.minutes} * 60'000;
  const std::int64_t t1 = t0 + duration;
  GeneratedSession gen;
  gen.window_start = t0;
  gen.window_end = t1;

  // Headset export: 1 Hz, defines the session window.
  {
    auto out = open_out(dir / "eeg.csv");
    out << "t_ms,delta,theta,alpha,beta,gamma,attention,meditation,blink\n";
    double attention = 50, meditation = 50;
    for (std::int64_t t = t0; t <= t1; t += 1000) {
      attention = std::clamp(attention + rng.uniform(-6, 6), 0.0, 100.0);
      meditation = std::clamp(meditation + rng.uniform(-5, 5), 0.0, 100.0);
      out << t;
      for (double base : {420000.0, 110000.0, 30000.0, 18000.0, 6000.0}) out << ',' << fixed(base * rng.uniform(0.4, 1.6), 1);
      out << ',' << std::lround(attention) << ',' << std::lround(meditation) << ',' << (rng.chance(0.12) ? 1 : 0) << '\n';
      ++gen.eeg_rows_in_window;
    }
  }

  // Smartwatch: 1 Hz, starts 2 s early and stops 3 s late.
  {
    auto out = open_out(dir / "heart_rate.csv");
    out << "t_ms,value\n";
    double bpm = 72;
    for (std::int64_t t = t0 - 2000; t <= t1 + 3000; t += 1000) {
      bpm = std::clamp(bpm + rng.uniform(-1.5, 1.5), 55.0, 110.0);
      out << t << ',' << fixed(bpm, 1) << '\n';
      if (t >= t0 && t <= t1) ++gen.heart_rate_rows_in_window;
    }
  }

  // Eye tracker: 10 Hz per eye, starts 1 s early and stops 1 s late.
  for (const char* eye : {"pupil_left", "pupil_right"}) {
    auto out = open_out(dir / (std::string(eye) + ".csv"));
    out << "t_ms,value\n";
    std::size_t in_window = 0;
    for (std::int64_t t = t0 - 1000; t <= t1 + 1000; t += 100) {
      double phase = static_cast<double>(t - t0) / 60000.0;
      out << t << ',' << fixed(3.2 + 0.4 * std::sin(phase) + rng.uniform(-0.05, 0.05), 4) << '\n';
      if (t >= t0 && t <= t1) ++in_window;
    }
    gen.pupil_rows_in_window = in_window;
  }

  // Activities alternate between the standalone logger (even slots) and MOOC
  // videos (odd slots), with short unlabeled gaps between them.
  static const char* kLoggeTasks[] = {"read_pdf_intro", "take_notes", "read_pdf_methods", "forum_post",
                                      "quiz_review",    "read_pdf_summary", "sketch_diagram", "glossary"};
  const std::int64_t slot = duration / spec.activities;
  std::vector<std::tuple<std::int64_t, std::string, std::string>> logge_rows;
  std::vector<EdxLine> edx;
  int video_no = 0, task_no = 0;
  for (int i = 0; i < spec.activities; ++i) {
    std::int64_t s = t0 + i * slot + 5000;
    std::int64_t e = t0 + (i + 1) * slot - 5000;
    if (i % 2 == 0) {
      std::string id = kLoggeTasks[task_no % 8];
      if (task_no >= 8) id += "_" + std::to_string(task_no / 8);
      ++task_no;
      logge_rows.emplace_back(s, id, "start");
      logge_rows.emplace_back(e, id, "end");
    } else {
      std::string vid = "v" + std::to_string(++video_no);
      if (video_no == 1) {
        // The logger also saw the first video, with looser bounds; MOOC data wins.
        logge_rows.emplace_back(s - 3000, "video:" + vid, "start");
        logge_rows.emplace_back(e + 2000, "video:" + vid, "end");
      }
      edx.push_back({s - 400, {{"username", spec.learner_id}, {"event_type", "load_video"}, {"time", edx_time(s - 400)},
                               {"event", json{{"id", vid}}.dump()}, {"event_source", "browser"}}});
      edx.push_back({s, {{"username", spec.learner_id}, {"event_type", "play_video"}, {"time", edx_time(s)},
                         {"event", json{{"id", vid}, {"currentTime", 0}}.dump()}, {"event_source", "browser"}}});
      edx.push_back({e, {{"username", spec.learner_id}, {"event_type", "pause_video"}, {"time", edx_time(e)},
                         {"event", json{{"id", vid}, {"currentTime", (e - s) / 1000}}.dump()}, {"event_source", "browser"}}});
    }
  }
  std::sort(logge_rows.begin(), logge_rows.end());
  {
    auto out = open_out(dir / "logge.csv");
    out << "time,activity_id,marker\n";
    for (const auto& [t, id, marker] : logge_rows) out << format_timestamp(t) << ',' << id << ',' << marker << '\n';
  }

  // Graded problems spread over the session; some are attempted twice.
  for (int j = 0; j < spec.items; ++j) {
    std::string item = "q" + std::to_string(j + 1);
    std::int64_t t = t0 + (2 * j + 1) * duration / (2 * spec.items) + 777;
    int attempts = rng.chance(0.3) ? 2 : 1;
    for (int a = 0; a < attempts; ++a) {
      int max_grade = 2;
      int grade = rng.below(max_grade + 1);
      std::int64_t ta = t + a * 20000;
      edx.push_back({ta, {{"username", spec.learner_id}, {"event_type", "problem_check"}, {"time", edx_time(ta)},
                          {"event", {{"problem_id", item}, {"grade", grade}, {"max_grade", max_grade}, {"attempts", a + 1}}},
                          {"event_source", "server"}}});
    }
  }
  std::stable_sort(edx.begin(), edx.end(), [](const EdxLine& a, const EdxLine& b) { return a.t < b.t; });
  {
    auto out = open_out(dir / "edx_log.jsonl");
    for (const auto& line : edx) out << line.doc.dump() << '\n';
  }

  {
    auto answers = open_out(dir / "pretest_answers.csv");
    auto key = open_out(dir / "pretest_key.csv");
    answers << "item,answer\n";
    key << "item,answer\n";
    static const char* kChoices[] = {"a", "b", "c", "d"};
    for (int j = 0; j < spec.items; ++j) {
      std::string item = "q" + std::to_string(j + 1);
      int correct = rng.below(4);
      int given = rng.chance(0.45) ? correct : rng.below(4);
      key << item << ',' << kChoices[correct] << '\n';
      answers << item << ',' << kChoices[given] << '\n';
    }
  }

  {
    auto out = open_out(dir / "front_cam_frames.csv");
    out << "frame,t_ms\n";
    std::int64_t frame = 0;
    for (std::int64_t t = t0 - 500; t <= t1; t += 1000) out << frame++ << ',' << t << '\n';
  }

  for (const auto& [name, size] : {std::pair{"front_cam.mp4", 4096}, std::pair{"screen.webm", 2500}}) {
    auto out = open_out(dir / name);
    for (int i = 0; i < size; ++i) out.put(static_cast<char>(rng.below(256)));
  }

  {
    auto out = open_out(dir / "profile.json");
    out << json{{"learner_id", spec.learner_id},
                {"attributes", {{"sex", "F"}, {"mouse_hand", "right"}, {"heart_problems", "none"}, {"marks", "7.5"}}}}
               .dump(2)
        << '\n';
  }

  {
    auto out = open_out(dir / "boundaries.json");
    json types = {
        {"play_video", {{"action", "opens"}, {"label", "video:{id}"}}},
        {"pause_video", {{"action", "closes"}}},
        {"stop_video", {{"action", "closes"}}},
        {"page_close", {{"action", "closes"}}},
        {"load_video", {{"action", "ignored"}}},
        {"problem_check", {{"action", "ignored"}}},
    };
    out << json{{"event_types", types}}.dump(2) << '\n';
  }

  json manifest = {
      {"session_id", spec.session_id},
      {"learner_profile_path", "profile.json"},
      {"edx_log_path", "edx_log.jsonl"},
      {"logge_csv_path", "logge.csv"},
      {"pretest_answers_path", "pretest_answers.csv"},
      {"pretest_key_path", "pretest_key.csv"},
      {"eeg_csv_path", "eeg.csv"},
      {"signal_csv_paths", {{"heart_rate", "heart_rate.csv"}, {"pupil_left", "pupil_left.csv"}, {"pupil_right", "pupil_right.csv"}}},
      {"frame_index_paths", {{"front_cam", "front_cam_frames.csv"}}},
      {"media_paths", {{"front_cam.mp4", "front_cam.mp4"}, {"screen.webm", "screen.webm"}}},
      {"boundary_config_path", "boundaries.json"},
      {"window_ms", 30000},
      {"grid_ms", 1000},
  };
  gen.manifest = dir / "manifest.json";
  auto out = open_out(gen.manifest);
  out << manifest.dump(2) << '\n';
  return gen;
}

}  // namespace m2lads::fixture
