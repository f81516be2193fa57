#pragma once

#include <deque>
#include <random>

#include "surrogate/server/teleop_core.hpp"

namespace surrogate {

struct LinkOptions {
  Micros latency{0};
  Micros jitter{0};  // uniform extra delay in [0, jitter]
  std::uint64_t seed = 1;
};

/// In-process connection with simulated latency, driven by the simulation
/// clock. Delivery stays in order in each direction, as over a WebSocket.
///
/// Per tick: pump_uplink(), core.step(), pump_downlink(), then poll().
class LoopbackLink {
 public:
  LoopbackLink(TeleopCore& core, std::string_view token, LinkOptions options = {});
  ~LoopbackLink();
  LoopbackLink(const LoopbackLink&) = delete;
  LoopbackLink& operator=(const LoopbackLink&) = delete;

  bool connected() const { return id_.has_value(); }
  ClientId id() const { return *id_; }

  void send(std::string text);
  void pump_uplink();
  void pump_downlink();
  /// Server messages whose delivery time has come.
  std::vector<nlohmann::json> poll();

  std::size_t in_flight() const { return up_.size() + down_.size(); }
  Micros core_now() { return core_.session().now(); }

 private:
  struct Packet {
    Micros due;
    std::string text;
  };
  Micros delivery_time(Micros& last);

  TeleopCore& core_;
  LinkOptions options_;
  std::optional<ClientId> id_;
  std::mt19937_64 rng_;
  std::deque<Packet> up_, down_;
  Micros last_up_{0}, last_down_{0};
};

}  // namespace surrogate
