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

#include "m2lads/cli.hpp"

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "m2lads/api.hpp"
#include "m2lads/error.hpp"
#include "m2lads/pipeline.hpp"

namespace m2lads {

namespace fs = std::filesystem;

namespace {

int exit_code_for(const Error& e) { return category_of(e.code()) == ErrorCategory::Io ? kExitIo : kExitValidation; }

struct Overrides {
  std::optional<TimestampMs> window_ms;
  std::optional<TimestampMs> grid_ms;

  void apply(IngestManifest& m) const {
    if (window_ms) m.window_ms = *window_ms;
    if (grid_ms) m.grid_ms = *grid_ms;
  }
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--window-ms", o.window_ms, "Trailing window width in ms (default 30000)")->check(CLI::PositiveNumber);
  cmd->add_option("--grid-ms", o.grid_ms, "Correlation grid step in ms (default 1000)")->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multimodal learning-session analytics: ingest, store, export and serve sessions", "m2lads"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string store_flag;
  app.add_option("--store", store_flag, "Store root (default $M2LADS_STORE_ROOT or ./m2lads_store)");

  std::string manifest_path;
  Overrides overrides;
  auto* ingest_cmd = app.add_subcommand("ingest", "Run the full pipeline on a manifest and store the session");
  ingest_cmd->add_option("manifest", manifest_path, "Ingest manifest JSON")->required();
  add_overrides(ingest_cmd, overrides);

  auto* validate_cmd = app.add_subcommand("validate", "Run the pipeline on a manifest without storing anything");
  validate_cmd->add_option("manifest", manifest_path, "Ingest manifest JSON")->required();
  add_overrides(validate_cmd, overrides);

  ApiConfig api;
  auto* serve_cmd = app.add_subcommand("serve", "Serve stored sessions over HTTP");
  serve_cmd->add_option("--bind", api.bind_address, "host:port")->capture_default_str();
  serve_cmd->add_option("--cors-origin", api.cors_allowed_origin, "Access-Control-Allow-Origin value")->capture_default_str();
  serve_cmd->add_option("--max-points-cap", api.max_points_cap, "Upper bound on points per signal response")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string session_id;
  std::string format = "csv";
  std::string out_dir;
  auto* export_cmd = app.add_subcommand("export", "Write a stored session's learner matrices and analytics");
  export_cmd->add_option("session_id", session_id, "Session to export")->required();
  export_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  export_cmd->add_option("--out", out_dir, "Output directory (default ./export_<session_id>)");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "m2lads: " << e.what() << '\n' << app.help();
    return kExitValidation;
  }

  const fs::path store_root = store_flag.empty() ? default_store_root() : fs::path(store_flag);

  try {
    if (ingest_cmd->parsed() || validate_cmd->parsed()) {
      IngestManifest manifest = load_manifest(manifest_path);
      overrides.apply(manifest);
      const TimestampMs now = current_time_ms();
      if (validate_cmd->parsed()) {
        SessionRecord record = build_session(manifest, now);
        out << "ok " << record.session_id << " window=[" << record.window.start << "," << record.window.end
            << "] signals=" << record.learner_matrices.size()
            << " activities=" << record.merged_matrix.intervals.size() << '\n';
        return kExitOk;
      }
      FileSessionStore store(store_root);
      SessionRecord record = ingest(manifest, store, now);
      out << record.session_id << '\n';
      return kExitOk;
    }
    if (export_cmd->parsed()) {
      FileSessionStore store(store_root);
      SessionRecord record = store.get_session(session_id);
      fs::path dir = out_dir.empty() ? fs::path("export_" + session_id) : fs::path(out_dir);
      for (const auto& path : export_session(record, format == "json" ? ExportFormat::Json : ExportFormat::Csv, dir)) {
        out << path.string() << '\n';
      }
      return kExitOk;
    }
    if (serve_cmd->parsed()) {
      api.store_root = store_root;
      serve(api);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "m2lads: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "m2lads: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace m2lads
