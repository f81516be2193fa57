#include "surrogate/control/command_json.hpp"

#include <cmath>

namespace surrogate {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw CommandError(key, "missing field");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) throw CommandError(key, "expected a finite number");
  return v.get<double>();
}

bool boolean(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_boolean()) throw CommandError(key, "expected true or false");
  return v.get<bool>();
}

std::string text(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw CommandError(key, "expected a string");
  return v.get<std::string>();
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array() || v.size() != N) throw CommandError(key, "expected " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) {
    if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) throw CommandError(key, "expected finite numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

Side side(const json& j) {
  const std::string s = text(j, "side");
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  throw CommandError("side", "expected 'left' or 'right'");
}

std::optional<StepSize> step(const json& j, bool required = false) {
  if (!required && (!j.contains("step") || j["step"].is_null())) return std::nullopt;
  const auto s = parse_step_size(text(j, "step"));
  if (!s) throw CommandError("step", "expected XS, S, M or L");
  return s;
}

void put_step(json& j, const std::optional<StepSize>& s) {
  if (s) j["step"] = to_string(*s);
}

}  // namespace

std::string_view command_type(const Command& c) {
  return std::visit(
      [](const auto& x) -> std::string_view {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LookCmd>) return "look";
        else if constexpr (std::is_same_v<T, DriveCmd>) return "drive";
        else if constexpr (std::is_same_v<T, TurnCmd>) return "turn";
        else if constexpr (std::is_same_v<T, SpineCmd>) return "spine";
        else if constexpr (std::is_same_v<T, HandStepCmd>) return "hand_step";
        else if constexpr (std::is_same_v<T, HandVerticalCmd>) return "hand_vertical";
        else if constexpr (std::is_same_v<T, HandRotateCmd>) return "hand_rotate";
        else if constexpr (std::is_same_v<T, GripperCmd>) return "gripper";
        else if constexpr (std::is_same_v<T, StepSizeCmd>) return "step_size";
        else return "mode";
      },
      c);
}

json command_to_json(const Command& c) {
  json j;
  j["type"] = command_type(c);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LookCmd>) {
          j["pixel"] = {x.pixel.x(), x.pixel.y()};
        } else if constexpr (std::is_same_v<T, DriveCmd>) {
          j["pixel"] = {x.pixel.x(), x.pixel.y()};
          j["held"] = x.held;
        } else if constexpr (std::is_same_v<T, TurnCmd>) {
          j["direction"] = x.direction == TurnDirection::left ? "left" : "right";
          j["held"] = x.held;
        } else if constexpr (std::is_same_v<T, SpineCmd>) {
          j["fraction"] = x.fraction;
        } else if constexpr (std::is_same_v<T, HandStepCmd>) {
          j["side"] = to_string(x.side);
          j["point"] = {x.disk_point.x(), x.disk_point.y(), x.disk_point.z()};
          put_step(j, x.step);
        } else if constexpr (std::is_same_v<T, HandVerticalCmd>) {
          j["side"] = to_string(x.side);
          j["direction"] = x.up ? "up" : "down";
          put_step(j, x.step);
        } else if constexpr (std::is_same_v<T, HandRotateCmd>) {
          j["side"] = to_string(x.side);
          j["arrow"] = to_string(x.arrow);
          put_step(j, x.step);
        } else if constexpr (std::is_same_v<T, GripperCmd>) {
          j["side"] = to_string(x.side);
          if (x.open_fraction) j["open"] = *x.open_fraction;
          else j["grasp"] = true;
        } else if constexpr (std::is_same_v<T, StepSizeCmd>) {
          j["side"] = to_string(x.side);
          j["step"] = to_string(x.step);
        } else {
          j["mode"] = to_string(x.mode);
        }
      },
      c);
  return j;
}

Command command_from_json(const json& j) {
  if (!j.is_object()) throw CommandError("", "command must be an object");
  const std::string type = text(j, "type");
  if (type == "look") return LookCmd{vec<2>(j, "pixel")};
  if (type == "drive") return DriveCmd{vec<2>(j, "pixel"), boolean(j, "held")};
  if (type == "turn") {
    const std::string d = text(j, "direction");
    if (d != "left" && d != "right") throw CommandError("direction", "expected 'left' or 'right'");
    return TurnCmd{d == "left" ? TurnDirection::left : TurnDirection::right, boolean(j, "held")};
  }
  if (type == "spine") return SpineCmd{number(j, "fraction")};
  if (type == "hand_step") return HandStepCmd{side(j), vec<3>(j, "point"), step(j)};
  if (type == "hand_vertical") {
    const std::string d = text(j, "direction");
    if (d != "up" && d != "down") throw CommandError("direction", "expected 'up' or 'down'");
    return HandVerticalCmd{side(j), d == "up", step(j)};
  }
  if (type == "hand_rotate") {
    const auto a = parse_arrow(text(j, "arrow"));
    if (!a) throw CommandError("arrow", "unknown arrow");
    return HandRotateCmd{side(j), *a, step(j)};
  }
  if (type == "gripper") {
    GripperCmd g{side(j), std::nullopt};
    const bool has_open = j.contains("open"), has_grasp = j.contains("grasp");
    if (has_open == has_grasp) throw CommandError("open", "expected exactly one of 'open' or 'grasp'");
    if (has_open) g.open_fraction = number(j, "open");
    else if (!boolean(j, "grasp")) throw CommandError("grasp", "must be true");
    return g;
  }
  if (type == "step_size") return StepSizeCmd{side(j), *step(j, true)};
  if (type == "mode") {
    const auto m = parse_mode(text(j, "mode"));
    if (!m) throw CommandError("mode", "unknown mode");
    return ModeCmd{*m};
  }
  throw CommandError("type", "unknown command type '" + type + "'");
}

json admin_to_json(const AdminCommand& c) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, RunStopCmd>) return {{"type", "run_stop"}, {"engaged", x.engaged}};
        else if constexpr (std::is_same_v<T, LoadItemCmd>)
          return {{"type", "load_item"}, {"item", x.item}, {"side", to_string(x.side)}};
        else if constexpr (std::is_same_v<T, ResetSceneCmd>) return {{"type", "reset_scene"}};
        else return {{"type", "restriction"}, {"mode", x.mode}, {"side", to_string(x.side)}};
      },
      c);
}

AdminCommand admin_from_json(const json& j) {
  if (!j.is_object()) throw CommandError("", "admin command must be an object");
  const std::string type = text(j, "type");
  if (type == "run_stop") return RunStopCmd{boolean(j, "engaged")};
  if (type == "load_item") return LoadItemCmd{text(j, "item"), side(j)};
  if (type == "reset_scene") return ResetSceneCmd{};
  if (type == "restriction") {
    RestrictionCmd r;
    r.mode = text(j, "mode");
    if (r.mode != "full" && r.mode != "arat") throw CommandError("mode", "expected 'full' or 'arat'");
    if (r.mode == "arat") r.side = side(j);
    return r;
  }
  throw CommandError("type", "unknown admin command '" + type + "'");
}

}  // namespace surrogate
