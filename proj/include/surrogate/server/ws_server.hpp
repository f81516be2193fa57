#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <thread>

#include "surrogate/server/teleop_core.hpp"

namespace surrogate {

struct ServerOptions {
  std::string address = "0.0.0.0";
  unsigned short port = 8080;  // 0 picks a free port
  std::filesystem::path static_dir;  // client assets; empty serves none
  /// Simulated seconds per wall-clock second.
  double rate = 1.0;
};

/// WebSocket front end at /ws?token=..., static files from static_dir and
/// the robot description at /robot.json, all on one port. A dedicated thread
/// steps the core in real time.
class WsServer {
 public:
  WsServer(TeleopCore& core, ServerOptions options);
  ~WsServer();
  WsServer(const WsServer&) = delete;
  WsServer& operator=(const WsServer&) = delete;

  /// Binds and starts the network and simulation threads.
  void start();
  void stop();
  unsigned short port() const;
  /// Simulation ticks run since start().
  std::uint64_t ticks() const { return ticks_; }

  struct Impl;  // network state, defined with the sessions

 private:
  void sim_loop();

  TeleopCore& core_;
  ServerOptions options_;
  std::unique_ptr<Impl> impl_;
  std::atomic<bool> running_{false};
  std::atomic<std::uint64_t> ticks_{0};
  std::thread sim_thread_;
};

}  // namespace surrogate
