// Copyright 2026 The Residual Copilot Authors
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

#ifndef SA_SERVER_SERVER_H_
#define SA_SERVER_SERVER_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "sa/server/session.h"

namespace sa::server {

struct ServerOptions {
  std::string address = "127.0.0.1";
  // 0 picks a free port; read it back with Server::port().
  uint16_t port = 8765;
  int threads = 1;
  // JSON lines of {session, label, slot}; empty keeps the mapping in memory.
  std::string blinding_log_path;
  // Tick timing summaries go to stderr when set.
  bool log_timing = true;
};

// Tick timing of one finished episode. Ticks more than 10% off the
// configured period count as late.
struct TickStats {
  std::string session;
  int64_t ticks = 0;
  int64_t late_ticks = 0;
  double mean_period_s = 0.0;
  double max_period_s = 0.0;
};

// WebSocket front end. Each connection owns one Session and runs on its own
// strand; sessions share only the read-only resources.
class Server {
 public:
  Server(ServerOptions opts, std::shared_ptr<const SessionResources> resources);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts the worker threads. Throws ConfigError when binding fails.
  void Start();
  // Blocks until Stop() is called from another thread or a signal handler.
  void Wait();
  void Stop();

  uint16_t port() const { return port_; }
  std::vector<BlindingEntry> blinding_log() const;
  std::vector<TickStats> tick_stats() const;

  // Called by connections; public for the implementation file only.
  struct Impl;

 private:
  ServerOptions opts_;
  std::shared_ptr<const SessionResources> resources_;
  std::unique_ptr<Impl> impl_;
  std::vector<std::thread> threads_;
  uint16_t port_ = 0;
};

}  // namespace sa::server

#endif  // SA_SERVER_SERVER_H_
