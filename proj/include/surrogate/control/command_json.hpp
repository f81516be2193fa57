#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "surrogate/control/commands.hpp"

namespace surrogate {

class CommandError : public std::runtime_error {
 public:
  CommandError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Wire form of an operator command, e.g. {"type": "hand_step", "side": "right", "point": [x, y, z], "step": "M"}.
nlohmann::json command_to_json(const Command& c);
/// Throws CommandError naming the offending field.
Command command_from_json(const nlohmann::json& j);
std::string_view command_type(const Command& c);

/// Commands issued by the harness or an administrator rather than the operator.
struct RunStopCmd {
  bool engaged = true;
};
struct LoadItemCmd {  // swap in one assessment item's objects, mirrored for `side`
  std::string item;
  Side side = Side::right;
};
struct ResetSceneCmd {};  // reload the full scene and its robot start
struct RestrictionCmd {
  std::string mode = "full";  // "full" or "arat"
  Side side = Side::right;
};

using AdminCommand = std::variant<RunStopCmd, LoadItemCmd, ResetSceneCmd, RestrictionCmd>;

nlohmann::json admin_to_json(const AdminCommand& c);
AdminCommand admin_from_json(const nlohmann::json& j);

}  // namespace surrogate
