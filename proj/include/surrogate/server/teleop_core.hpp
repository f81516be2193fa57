#pragma once

#include <deque>
#include <functional>
#include <map>
#include <mutex>

#include "surrogate/server/protocol.hpp"
#include "surrogate/telemetry/recorded_session.hpp"

namespace surrogate {

using ClientId = std::uint64_t;

struct CoreOptions {
  std::string token = "surrogate";
  std::string admin_token;  // empty: clients cannot send admin messages
  Restriction restriction;
  Micros snapshot_period{100'000};
  Micros scene_period{100'000};
  Micros diagnostics_period{1'000'000};
  Micros heartbeat_period{1'000'000};
  Micros silence_timeout{10'000'000};
};

/// Transport-independent server: sessions, the operator lock, ingress
/// validation and the outgoing streams. Network threads call connect(),
/// receive(), drain() and disconnect(); one simulation thread calls step().
///
/// Each client's outbox holds reliable events (replies, goal transitions,
/// contacts) in order plus latest-wins slots for snapshots. drain() returns
/// the events first, then the current snapshots, and stamps every message
/// with the connection's next sequence number.
class TeleopCore {
 public:
  TeleopCore(RecordedSession& session, CoreOptions options = {});

  /// nullopt when the token is wrong.
  std::optional<ClientId> connect(std::string_view token);
  void disconnect(ClientId id);
  void receive(ClientId id, std::string text);
  std::vector<std::string> drain(ClientId id);
  /// Closed by the server (silence timeout); the transport should hang up.
  bool closed(ClientId id) const;

  /// Processes delivered messages, advances the simulation one tick and
  /// queues the resulting broadcasts.
  void step();

  /// Harness/CLI authority: logged, applied between ticks.
  void admin(const AdminCommand& c);

  Restriction restriction() const;
  std::optional<ClientId> operator_client() const;
  std::size_t clients() const;
  Session& session() { return rs_.session(); }
  RecordedSession& recorded() { return rs_; }
  const CoreOptions& options() const { return options_; }

  /// Called (from step or admin, under no lock) when a client has output waiting.
  void set_output_callback(std::function<void(ClientId)> cb);

 private:
  struct Client {
    bool is_operator = false;
    bool closed = false;
    std::uint64_t last_seq = 0;
    bool seen_seq = false;
    Micros last_heard{0};
    std::uint64_t next_seq = 1;
    std::uint64_t event_seq = 0;
    std::deque<nlohmann::json> events;
    std::optional<nlohmann::json> state, scene, diagnostics;
  };
  struct Inbound {
    ClientId client;
    std::string text;
  };

  void handle(ClientId id, Client& c, const std::string& text);
  void apply_admin(const AdminCommand& c);
  void push_event(Client& c, nlohmann::json msg);
  void broadcast_event(const nlohmann::json& msg);
  void notify_all();

  RecordedSession& rs_;
  CoreOptions options_;
  mutable std::mutex mutex_;
  std::map<ClientId, Client> clients_;
  std::deque<Inbound> inbox_;
  ClientId next_client_ = 1;
  Micros next_snapshot_{0}, next_scene_{0}, next_diagnostics_{0}, next_heartbeat_{0};
  std::function<void(ClientId)> on_output_;
};

}  // namespace surrogate
