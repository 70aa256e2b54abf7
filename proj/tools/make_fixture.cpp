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

// Writes a synthetic learning-session recording (all raw inputs plus
// manifest.json) into a directory.

#include <iostream>

#include <CLI11.hpp>

#include "m2lads/error.hpp"
#include "m2lads/fixture.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic multimodal session fixture", "m2lads_make_fixture"};
  std::string dir;
  m2lads::fixture::SessionSpec spec;
  app.add_option("dir", dir, "Output directory")->required();
  app.add_option("--session-id", spec.session_id)->capture_default_str();
  app.add_option("--learner-id", spec.learner_id)->capture_default_str();
  app.add_option("--minutes", spec.minutes)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--activities", spec.activities)->check(CLI::Range(2, 1000))->capture_default_str();
  app.add_option("--items", spec.items)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", spec.seed)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    auto gen = m2lads::fixture::write_session(dir, spec);
    std::cout << gen.manifest.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "m2lads_make_fixture: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
