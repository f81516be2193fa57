#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "surrogate/control/session.hpp"

namespace surrogate {

inline constexpr int kLogSchema = 1;

enum class RecordKind { header, command, joints, frame, diagnostics, goal, contact };
std::string_view to_string(RecordKind k);
std::optional<RecordKind> parse_record_kind(std::string_view s);

/// One line of a session log: {"t": <sim micros>, "kind": ..., "session": ..., "data": {...}}.
struct LogRecord {
  Micros t{0};
  RecordKind kind = RecordKind::command;
  std::string session;
  nlohmann::json data;
};

nlohmann::json to_json(const LogRecord& r);
/// Throws std::invalid_argument on a malformed record.
LogRecord record_from_json(const nlohmann::json& j);

// Payloads
nlohmann::json header_data(const Session& s);
nlohmann::json operator_command_data(const Command& c, const std::string& client, std::uint64_t seq);
nlohmann::json admin_command_data(const AdminCommand& c);
nlohmann::json joints_data(const World& w);
nlohmann::json frame_data(const World& w);
nlohmann::json diagnostics_data(const World& w);
nlohmann::json goal_data(const GoalTransition& g);
nlohmann::json contact_data(const ContactEvent& e);

nlohmann::json pose_json(const Pose& p);  // {"position": [x,y,z], "orientation": [w,x,y,z]}
Pose pose_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ControllerConfig& c);
ControllerConfig controller_config_from_json(const nlohmann::json& j);

/// Rebuilds the session a header record describes, in its initial state.
std::unique_ptr<Session> session_from_header(const LogRecord& header);

}  // namespace surrogate
