// Copyright 2026 The sctune Authors
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

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "sctune/harness/teleop.hpp"

namespace sctune::harness {

struct ServeOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  double tick_rate = 20.0;     // [Hz]
  /// Advance one tick per received cmd frame instead of on the timer
  /// (scripted clients and replay).
  bool lockstep = false;
  /// SIGINT and SIGTERM stop the server.
  bool stop_on_signal = false;
};

using SessionFactory = std::function<std::unique_ptr<TeleopSession>(std::uint64_t id)>;
/// Runs off the tick path; may be called from a worker thread.
using EpisodeHandler = std::function<std::string(const EpisodeRecord&)>;

/// WebSocket endpoint: one TeleopSession per connection, text frames only.
class TeleopServer {
 public:
  TeleopServer(ServeOptions options, SessionFactory factory, EpisodeHandler on_episode);
  ~TeleopServer();
  TeleopServer(const TeleopServer&) = delete;
  TeleopServer& operator=(const TeleopServer&) = delete;

  /// Port actually bound.
  unsigned short port() const;
  /// Serves until stop() is called.
  void run();
  /// Thread safe. run() returns once open connections have closed.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocking convenience wrapper around TeleopServer.
void serve_teleop(const ServeOptions& options, SessionFactory factory,
                  EpisodeHandler on_episode);

}  // namespace sctune::harness
