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

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>

#include "m2lads/store.hpp"

namespace httplib {
class Server;
}

namespace m2lads {

struct ApiConfig {
  std::string bind_address = "127.0.0.1:8080";  // host:port; port 0 picks a free one
  std::filesystem::path store_root = "m2lads_store";
  std::string cors_allowed_origin = "*";
  std::size_t max_points_cap = 5000;
};

/// Read-mostly JSON service over a SessionStore. Every GET is idempotent;
/// POST /api/sessions runs the ingest pipeline on a manifest body.
class ApiServer {
 public:
  ApiServer(ApiConfig config, std::shared_ptr<SessionStore> store);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds the listening socket and returns the bound port. Throws BindFailure.
  int bind();
  /// Serves until stop(); in-flight requests complete before it returns.
  void run();
  void stop();

  const ApiConfig& config() const { return config_; }

 private:
  void install_routes();

  ApiConfig config_;
  std::shared_ptr<SessionStore> store_;
  std::unique_ptr<httplib::Server> server_;
  std::atomic<unsigned long> error_seq_{0};
};

/// Splits "host:port"; throws BindFailure on a malformed address.
std::pair<std::string, int> split_bind_address(const std::string& address);

/// Opens the store at config.store_root, binds, and serves until SIGINT or
/// SIGTERM. Throws StoreUnavailable when the root is missing.
void serve(const ApiConfig& config);

}  // namespace m2lads
