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

#include "m2lads/api.hpp"

#include <csignal>
#include <iostream>
#include <pthread.h>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "m2lads/csv.hpp"
#include "m2lads/error.hpp"
#include "m2lads/pipeline.hpp"
#include "m2lads/serialize.hpp"

namespace m2lads {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string_view content_type_for(const std::string& name) {
  static const std::pair<std::string_view, std::string_view> kTypes[] = {
      {".mp4", "video/mp4"},   {".webm", "video/webm"},       {".avi", "video/x-msvideo"},
      {".mov", "video/quicktime"}, {".mkv", "video/x-matroska"}, {".mp3", "audio/mpeg"},
      {".wav", "audio/wav"},   {".png", "image/png"},          {".jpg", "image/jpeg"},
      {".jpeg", "image/jpeg"}, {".json", "application/json"},  {".csv", "text/csv"},
      {".txt", "text/plain"},
  };
  std::string ext = fs::path(name).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (const auto& [e, type] : kTypes) {
    if (ext == e) return type;
  }
  return "application/octet-stream";
}

std::optional<std::int64_t> int_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  auto v = csv::parse_int(req.get_param_value(name));
  if (!v) throw Error(ErrorCode::InvalidArgument, std::string("query parameter '") + name + "' must be an integer");
  return v;
}

json summary_view(const SessionRecord& r, const std::vector<MediaRef>& media) {
  json signals = json::array();
  for (const auto& [kind, lm] : r.learner_matrices) {
    signals.push_back({{"kind", kind}, {"unit", std::string(unit_symbol(unit_of(kind)))}, {"rows", lm.rows.size()}});
  }
  json videos = json::array();
  for (const auto& v : r.frame_indexes) videos.push_back({{"video_id", v.video_id}, {"frames", v.rows.size()}});
  return json{{"session_id", r.session_id},
              {"learner", r.learner},
              {"window", r.window},
              {"created_at", r.created_at},
              {"signals", std::move(signals)},
              {"activity_count", r.merged_matrix.intervals.size()},
              {"blinks", r.blinks},
              {"pretest_items", r.pretest.rows.size()},
              {"posttest_items", r.posttest.rows.size()},
              {"performance",
               {{"pre_mean", r.performance.pre_mean}, {"post_mean", r.performance.post_mean}, {"gain", r.performance.gain}}},
              {"videos", std::move(videos)},
              {"media", media}};
}

}  // namespace

std::pair<std::string, int> split_bind_address(const std::string& address) {
  auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0) throw Error(ErrorCode::BindFailure, "expected host:port, got '" + address + "'");
  auto port = csv::parse_int(std::string_view(address).substr(colon + 1));
  if (!port || *port < 0 || *port > 65535) throw Error(ErrorCode::BindFailure, "bad port in '" + address + "'");
  return {address.substr(0, colon), static_cast<int>(*port)};
}

ApiServer::ApiServer(ApiConfig config, std::shared_ptr<SessionStore> store)
    : config_(std::move(config)), store_(std::move(store)), server_(std::make_unique<httplib::Server>()) {
  if (config_.max_points_cap < 1) throw Error(ErrorCode::InvalidArgument, "max_points_cap must be >= 1");
  install_routes();
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind() {
  auto [host, port] = split_bind_address(config_.bind_address);
  if (port == 0) {
    int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::BindFailure, "cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) throw Error(ErrorCode::BindFailure, "cannot bind " + config_.bind_address);
  return port;
}

void ApiServer::run() { server_->listen_after_bind(); }

void ApiServer::stop() {
  if (server_) server_->stop();
}

void ApiServer::install_routes() {
  using httplib::Request;
  using httplib::Response;
  auto& srv = *server_;

  // Every handler runs inside guard(): library errors map onto HTTP statuses,
  // anything unexpected becomes a 500 with an id that is also logged.
  auto guard = [this](auto handler) {
    return [this, handler](const Request& req, Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        switch (category_of(e.code())) {
          case ErrorCategory::NotFound:
            send_json(res, 404, {{"error", "not_found"}});
            return;
          case ErrorCategory::Validation:
            send_json(res, 400, {{"error", "bad_request"}, {"detail", e.what()}});
            return;
          case ErrorCategory::Collision:
            send_json(res, 409, {{"error", "conflict"}, {"detail", e.what()}});
            return;
          case ErrorCategory::Io:
            if (e.code() == ErrorCode::InputMissing) {
              send_json(res, 400, {{"error", "bad_request"}, {"detail", e.what()}});
              return;
            }
            break;
          case ErrorCategory::Internal:
            break;
        }
        auto id = "e" + std::to_string(++error_seq_);
        std::cerr << "[m2lads] " << id << " " << req.method << " " << req.path << ": " << e.what() << '\n';
        send_json(res, 500, {{"error", "internal"}, {"id", id}});
      } catch (const std::exception& e) {
        auto id = "e" + std::to_string(++error_seq_);
        std::cerr << "[m2lads] " << id << " " << req.method << " " << req.path << ": " << e.what() << '\n';
        send_json(res, 500, {{"error", "internal"}, {"id", id}});
      }
    };
  };

  srv.set_post_routing_handler([this](const Request&, Response& res) {
    res.set_header("Access-Control-Allow-Origin", config_.cors_allowed_origin);
  });
  srv.set_error_handler([](const Request&, Response& res) {
    if (res.status == 404 && res.body.empty()) res.set_content(R"({"error":"not_found"})", "application/json");
  });
  srv.Options(R"(/.*)", [](const Request&, Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Range");
    res.status = 204;
  });

  auto health = guard([](const Request&, Response& res) { send_json(res, 200, {{"status", "ok"}}); });
  srv.Get("/healthz", health);
  srv.Get("/api/healthz", health);

  srv.Get("/api/sessions", guard([this](const Request& req, Response& res) {
            SessionFilter filter;
            if (req.has_param("learner_id")) filter.learner_id = req.get_param_value("learner_id");
            filter.from = int_param(req, "from");
            filter.to = int_param(req, "to");
            send_json(res, 200, json(store_->list_sessions(filter)));
          }));

  srv.Post("/api/sessions", guard([this](const Request& req, Response& res) {
             json doc = json::parse(req.body, nullptr, false);
             if (doc.is_discarded()) throw Error(ErrorCode::InvalidManifest, "body is not valid JSON");
             IngestManifest manifest = manifest_from_json(doc, fs::current_path());
             SessionRecord record = ingest(manifest, *store_, current_time_ms());
             send_json(res, 201, {{"session_id", record.session_id}});
           }));

  srv.Get(R"(/api/sessions/([^/]+))", guard([this](const Request& req, Response& res) {
            const std::string id = req.matches[1];
            SessionRecord record = store_->get_session(id);
            send_json(res, 200, summary_view(record, store_->list_media(id)));
          }));

  srv.Get(R"(/api/sessions/([^/]+)/signals/([^/]+))", guard([this](const Request& req, Response& res) {
            const std::string id = req.matches[1];
            const std::string token = req.matches[2];
            auto kind = kind_from_token(token);
            if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown signal kind '" + token + "'");
            SessionRecord record = store_->get_session(id);
            auto lm = record.learner_matrices.find(*kind);
            if (lm == record.learner_matrices.end()) throw Error(ErrorCode::NotFound, token);

            TimestampMs from = int_param(req, "from").value_or(record.window.start);
            TimestampMs to = int_param(req, "to").value_or(record.window.end);
            std::int64_t requested = int_param(req, "max_points").value_or(static_cast<std::int64_t>(config_.max_points_cap));
            if (requested < 1) throw Error(ErrorCode::InvalidRange, "max_points must be >= 1");
            if (from > to) throw Error(ErrorCode::InvalidRange, "from must not exceed to");
            auto max_points = std::min(static_cast<std::size_t>(requested), config_.max_points_cap);

            send_json(res, 200,
                      {{"session_id", id},
                       {"kind", *kind},
                       {"unit", std::string(unit_symbol(unit_of(*kind)))},
                       {"from", from},
                       {"to", to},
                       {"max_points", max_points},
                       {"points", downsample(lm->second, from, to, max_points)}});
          }));

  srv.Get(R"(/api/sessions/([^/]+)/activities)", guard([this](const Request& req, Response& res) {
            send_json(res, 200, json(store_->get_session(req.matches[1]).merged_matrix));
          }));

  srv.Get(R"(/api/sessions/([^/]+)/analytics/correlations)", guard([this](const Request& req, Response& res) {
            send_json(res, 200, json(store_->get_session(req.matches[1]).correlations));
          }));

  srv.Get(R"(/api/sessions/([^/]+)/performance)", guard([this](const Request& req, Response& res) {
            send_json(res, 200, json(store_->get_session(req.matches[1]).performance));
          }));

  srv.Get(R"(/api/sessions/([^/]+)/summaries)", guard([this](const Request& req, Response& res) {
            send_json(res, 200, json(store_->get_session(req.matches[1]).summaries));
          }));

  srv.Get(R"(/api/sessions/([^/]+)/frames/([^/]+))", guard([this](const Request& req, Response& res) {
            SessionRecord record = store_->get_session(req.matches[1]);
            const std::string video = req.matches[2];
            for (const auto& index : record.frame_indexes) {
              if (index.video_id == video) {
                send_json(res, 200, json(index));
                return;
              }
            }
            throw Error(ErrorCode::NotFound, "video " + video);
          }));

  srv.Get(R"(/api/sessions/([^/]+)/media/([^/]+))", guard([this](const Request& req, Response& res) {
            const std::string id = req.matches[1];
            const std::string name = req.matches[2];
            if (!store_->has_session(id)) throw Error(ErrorCode::NotFound, "session " + id);
            MediaRef ref = store_->media_info(id, name);
            auto stream = std::make_shared<std::ifstream>(store_->open_media(id, name));
            res.set_header("Accept-Ranges", "bytes");
            // Status stays unset so the library answers 206 for range requests.
            res.set_content_provider(
                static_cast<std::size_t>(ref.byte_size), std::string(content_type_for(name)),
                [stream](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
                  char buf[64 * 1024];
                  stream->clear();
                  stream->seekg(static_cast<std::streamoff>(offset));
                  std::size_t left = length;
                  while (left > 0) {
                    stream->read(buf, static_cast<std::streamsize>(std::min(left, sizeof buf)));
                    auto got = static_cast<std::size_t>(stream->gcount());
                    if (got == 0) return false;
                    if (!sink.write(buf, got)) return false;
                    left -= got;
                  }
                  return true;
                });
          }));
}

void serve(const ApiConfig& config) {
  if (!fs::is_directory(config.store_root)) {
    throw Error(ErrorCode::StoreUnavailable, "store root " + config.store_root.string() + " does not exist");
  }

  // Route SIGINT/SIGTERM to a dedicated thread so stop() runs outside
  // signal-handler context.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ApiServer server(config, std::make_shared<FileSessionStore>(config.store_root));
  int port = server.bind();
  std::cerr << "[m2lads] serving " << config.store_root.string() << " on port " << port << '\n';

  std::atomic<bool> signalled{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    signalled = true;
    server.stop();
  });
  server.run();
  // run() can also return without a signal (e.g. listener failure); wake the waiter.
  if (!signalled) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
}

}  // namespace m2lads
