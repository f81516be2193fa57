#include "surrogate/server/protocol.hpp"

namespace surrogate {

using nlohmann::json;

namespace {

json vec(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

ClientKind parse_kind(const std::string& s) {
  if (s == "command") return ClientKind::command;
  if (s == "preview") return ClientKind::preview;
  if (s == "peek") return ClientKind::peek;
  if (s == "heartbeat") return ClientKind::heartbeat;
  if (s == "claim_lock") return ClientKind::claim_lock;
  if (s == "admin") return ClientKind::admin;
  throw ProtocolError("unknown message type '" + s + "'");
}

std::string_view kind_name(ClientKind k) {
  switch (k) {
    case ClientKind::command: return "command";
    case ClientKind::preview: return "preview";
    case ClientKind::peek: return "peek";
    case ClientKind::heartbeat: return "heartbeat";
    case ClientKind::claim_lock: return "claim_lock";
    case ClientKind::admin: return "admin";
  }
  return "heartbeat";
}

}  // namespace

ClientMessage parse_client_message(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  if (!j.contains("seq") || !j["seq"].is_number_unsigned()) throw ProtocolError("seq: expected a non-negative integer");
  if (!j.contains("type") || !j["type"].is_string()) throw ProtocolError("type: missing");
  ClientMessage m;
  m.seq = j["seq"].get<std::uint64_t>();
  m.kind = parse_kind(j["type"].get<std::string>());
  try {
    switch (m.kind) {
      case ClientKind::command:
        if (!j.contains("command")) throw ProtocolError("command: missing");
        m.command = command_from_json(j["command"]);
        break;
      case ClientKind::preview:
        if (!j.contains("command")) throw ProtocolError("command: missing");
        m.command = command_from_json(j["command"]);
        if (!as_hand_command(*m.command)) throw ProtocolError("command: previews exist for hand commands only");
        break;
      case ClientKind::peek: {
        const std::string side = j.value("side", "right");
        if (side != "left" && side != "right") throw ProtocolError("side: expected 'left' or 'right'");
        m.peek.side = parse_side(side);
        m.peek.radius = j.value("radius", m.peek.radius);
        m.peek.stride = j.value("stride", m.peek.stride);
        if (!(m.peek.radius > 0.0 && m.peek.radius <= 1.0)) throw ProtocolError("radius: expected (0, 1] m");
        if (m.peek.stride < 1 || m.peek.stride > 64) throw ProtocolError("stride: expected 1..64");
        break;
      }
      case ClientKind::admin:
        if (!j.contains("admin")) throw ProtocolError("admin: missing");
        m.admin = admin_from_json(j["admin"]);
        m.admin_token = j.value("token", "");
        break;
      case ClientKind::heartbeat:
      case ClientKind::claim_lock: break;
    }
  } catch (const CommandError& e) {
    throw ProtocolError(std::string("command.") + e.what());
  } catch (const json::exception& e) {
    throw ProtocolError(e.what());
  }
  return m;
}

json client_message_json(const ClientMessage& m) {
  json j{{"seq", m.seq}, {"type", kind_name(m.kind)}};
  if (m.command) j["command"] = command_to_json(*m.command);
  if (m.kind == ClientKind::peek) {
    j["side"] = to_string(m.peek.side);
    j["radius"] = m.peek.radius;
    j["stride"] = m.peek.stride;
  }
  if (m.admin) {
    j["admin"] = admin_to_json(*m.admin);
    j["token"] = m.admin_token;
  }
  return j;
}

json goal_json(const ControlGoal& g) {
  json j{{"id", g.id},
         {"subsystem", to_string(g.subsystem)},
         {"state", to_string(g.state)},
         {"issued", g.issued.count()}};
  if (!g.reason.empty()) j["reason"] = g.reason;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ArmGoal>) {
          j["pose"] = pose_json(p.gripper);
          j["fingertip"] = vec(p.fingertip);
        } else if constexpr (std::is_same_v<T, HeadGoal>) {
          j["pan"] = p.pan;
          j["tilt"] = p.tilt;
          j["target"] = vec(p.target);
        } else if constexpr (std::is_same_v<T, BaseGoal>) {
          if (p.kind == BaseGoal::Kind::drive) {
            j["drive"] = vec(p.ground);
          } else {
            j["yaw_rate"] = p.yaw_rate;
          }
        } else if constexpr (std::is_same_v<T, TorsoGoal>) {
          j["lift"] = p.lift;
        } else {
          j["aperture"] = p.aperture;
          j["grasp"] = p.grasp;
          if (p.outcome) j["outcome"] = to_string(*p.outcome);
          if (!p.object.empty()) j["object"] = p.object;
        }
      },
      g.payload);
  return j;
}

json welcome_message(std::uint64_t client, bool is_operator, const Restriction& r, const World& w) {
  json j = scene_layout_message(w);
  j["type"] = "welcome";
  j["protocol"] = kProtocolVersion;
  j["client"] = client;
  j["role"] = is_operator ? "operator" : "spectator";
  j["restriction"] = r.describe();
  j["robot"] = json::parse(w.robot().source);
  return j;
}

json ack_message(std::uint64_t client_seq, const CommandResult& r) {
  if (!r.accepted) return rejected_message(client_seq, r.error);
  json j{{"type", "ack"}, {"ack", client_seq}};
  if (r.goal) j["goal"] = *r.goal;
  if (!r.notice.empty()) j["notice"] = r.notice;
  return j;
}

json rejected_message(std::uint64_t client_seq, const std::string& reason) {
  return {{"type", "rejected"}, {"ack", client_seq}, {"reason", reason}};
}

json preview_message(std::uint64_t client_seq, const HandPlan& plan) {
  json j{{"type", "preview"}, {"ack", client_seq}, {"ok", plan.ok}};
  if (!plan.error.empty()) j["error"] = plan.error;
  if (plan.error != "zero_length_step") {
    j["pose"] = pose_json(plan.gripper);
    j["fingertip"] = vec(plan.fingertip);
  }
  return j;
}

json peek_message(std::uint64_t client_seq, const World& w, const PeekRequest& req) {
  const Eigen::Vector3d center = w.fingertip(req.side);
  json points = json::array();
  for (const auto& p : w.sample_depth_region(center, req.radius, req.stride))
    points.push_back({p.position.x(), p.position.y(), p.position.z(), p.color[0], p.color[1], p.color[2]});
  return {{"type", "peek"},
          {"ack", client_seq},
          {"side", to_string(req.side)},
          {"center", vec(center)},
          {"radius", req.radius},
          {"gripper", pose_json(w.gripper_pose(req.side))},
          {"camera", pose_json(w.depth_camera())},
          {"points", std::move(points)}};
}

json goal_message(const GoalTransition& t, const ControlGoal* goal) {
  json j = goal ? goal_json(*goal) : json::object();
  j["type"] = "goal";
  j["id"] = t.goal;
  j["subsystem"] = to_string(t.subsystem);
  j["state"] = to_string(t.state);
  if (!t.reason.empty()) j["reason"] = t.reason;
  else j.erase("reason");
  return j;
}

json contact_message(const ContactEvent& e) {
  json j = contact_data(e);
  j["type"] = "contact";
  return j;
}

json state_message(const Session& s, const Restriction& r) {
  const World& w = s.world();
  const Controller& c = s.controller();
  json goals = json::array();
  for (std::size_t i = 0; i < kSubsystems; ++i)
    if (const ControlGoal* g = c.goals().latest(static_cast<Subsystem>(i))) goals.push_back(goal_json(*g));
  json held = json::object();
  for (Side side : {Side::left, Side::right})
    held[std::string(to_string(side))] = w.held(side) ? json(w.held(side)->object) : json(nullptr);
  return {{"type", "state"},
          {"joints", joints_data(w)},
          {"base_velocity", vec(w.base_velocity())},
          {"grippers",
           {{"left", pose_json(w.gripper_pose(Side::left))}, {"right", pose_json(w.gripper_pose(Side::right))}}},
          {"fingertips", {{"left", vec(w.fingertip(Side::left))}, {"right", vec(w.fingertip(Side::right))}}},
          {"camera", pose_json(w.camera())},
          {"held", held},
          {"goals", goals},
          {"mode", to_string(c.mode())},
          {"step_sizes", {{"left", to_string(c.step_size(Side::left))}, {"right", to_string(c.step_size(Side::right))}}},
          {"restriction", r.describe()}};
}

json scene_message(const World& w) {
  json objects = json::array();
  for (const auto& o : w.objects()) {
    json e = pose_json(o.pose);
    e["id"] = o.id;
    objects.push_back(std::move(e));
  }
  return {{"type", "scene"}, {"objects", std::move(objects)}};
}

json scene_layout_message(const World& w) {
  json objects = json::array();
  for (const auto& o : w.objects()) objects.push_back(object_to_json(o));
  return {{"type", "scene_layout"}, {"name", w.scene().name}, {"objects", std::move(objects)}};
}

json diagnostics_message(const World& w) {
  json j = diagnostics_data(w);
  j["type"] = "diagnostics";
  return j;
}

json lock_message(bool is_operator) { return {{"type", "lock"}, {"role", is_operator ? "operator" : "spectator"}}; }

}  // namespace surrogate
