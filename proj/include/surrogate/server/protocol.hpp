#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "surrogate/server/restriction.hpp"
#include "surrogate/telemetry/record.hpp"

namespace surrogate {

inline constexpr int kProtocolVersion = 1;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PeekRequest {
  Side side = Side::right;
  double radius = 0.15;
  int stride = 4;
};

enum class ClientKind { command, preview, peek, heartbeat, claim_lock, admin };

/// {"seq": n, "type": ..., ...}; see docs/protocol.md.
struct ClientMessage {
  std::uint64_t seq = 0;
  ClientKind kind = ClientKind::heartbeat;
  std::optional<Command> command;  // command, preview
  PeekRequest peek;
  std::optional<AdminCommand> admin;
  std::string admin_token;
};

/// Throws ProtocolError with a reason suitable for a rejection message.
ClientMessage parse_client_message(std::string_view text);
nlohmann::json client_message_json(const ClientMessage& m);

// Server messages. The "seq" field is added when a message is handed to a connection.
nlohmann::json welcome_message(std::uint64_t client, bool is_operator, const Restriction& r, const World& w);
nlohmann::json ack_message(std::uint64_t client_seq, const CommandResult& r);
nlohmann::json rejected_message(std::uint64_t client_seq, const std::string& reason);
nlohmann::json preview_message(std::uint64_t client_seq, const HandPlan& plan);
nlohmann::json peek_message(std::uint64_t client_seq, const World& w, const PeekRequest& req);
nlohmann::json goal_message(const GoalTransition& t, const ControlGoal* goal);
nlohmann::json contact_message(const ContactEvent& e);
nlohmann::json state_message(const Session& s, const Restriction& r);
nlohmann::json scene_message(const World& w);        // object poses
nlohmann::json scene_layout_message(const World& w); // full geometry, after scene swaps
nlohmann::json diagnostics_message(const World& w);
nlohmann::json lock_message(bool is_operator);

nlohmann::json goal_json(const ControlGoal& g);

}  // namespace surrogate
