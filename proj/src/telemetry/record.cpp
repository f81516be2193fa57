#include "surrogate/telemetry/record.hpp"

#include <array>
#include <stdexcept>

namespace surrogate {

using nlohmann::json;

namespace {
constexpr std::array<std::string_view, 7> kKinds{"header", "command", "joints", "frame",
                                                 "diagnostics", "goal", "contact"};

json vec(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

json arm_json(const ArmAngles& q) {
  json a = json::array();
  for (int i = 0; i < kArmJoints; ++i) a.push_back(q[i]);
  return a;
}
}  // namespace

std::string_view to_string(RecordKind k) { return kKinds[static_cast<int>(k)]; }

std::optional<RecordKind> parse_record_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKinds.size(); ++i)
    if (kKinds[i] == s) return static_cast<RecordKind>(i);
  return std::nullopt;
}

json to_json(const LogRecord& r) {
  return {{"t", r.t.count()}, {"kind", to_string(r.kind)}, {"session", r.session}, {"data", r.data}};
}

LogRecord record_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  for (const char* key : {"t", "kind", "session", "data"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("record lacks '") + key + "'");
  if (!j["t"].is_number_integer()) throw std::invalid_argument("'t' must be integer microseconds");
  if (!j["kind"].is_string() || !j["session"].is_string()) throw std::invalid_argument("bad 'kind' or 'session'");
  const auto kind = parse_record_kind(j["kind"].get<std::string>());
  if (!kind) throw std::invalid_argument("unknown record kind '" + j["kind"].get<std::string>() + "'");
  return {Micros{j["t"].get<std::int64_t>()}, *kind, j["session"].get<std::string>(), j["data"]};
}

json pose_json(const Pose& p) {
  const auto& q = p.orientation;
  return {{"position", vec(p.position)}, {"orientation", {q.w(), q.x(), q.y(), q.z()}}};
}

Pose pose_from_json(const json& j) {
  const auto& p = j.at("position");
  const auto& o = j.at("orientation");
  return Pose({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()},
              Eigen::Quaterniond(o[0].get<double>(), o[1].get<double>(), o[2].get<double>(), o[3].get<double>()));
}

json to_json(const ControllerConfig& c) {
  return {{"max_linear_velocity", c.max_linear_velocity},
          {"max_angular_velocity", c.max_angular_velocity},
          {"drive_gain", c.drive_gain},
          {"drive_stop_distance", c.drive_stop_distance},
          {"arm_speed", c.arm_speed},
          {"arm_angular_speed", c.arm_angular_speed},
          {"path_resolution", c.path_resolution},
          {"path_angle_resolution", c.path_angle_resolution},
          {"deadman_us", c.deadman.count()},
          {"tracking_period_us", c.tracking_period.count()},
          {"floor_margin", c.floor_margin},
          {"look_fallback_distance", c.look_fallback_distance}};
}

ControllerConfig controller_config_from_json(const json& j) {
  ControllerConfig c;
  c.max_linear_velocity = j.value("max_linear_velocity", c.max_linear_velocity);
  c.max_angular_velocity = j.value("max_angular_velocity", c.max_angular_velocity);
  c.drive_gain = j.value("drive_gain", c.drive_gain);
  c.drive_stop_distance = j.value("drive_stop_distance", c.drive_stop_distance);
  c.arm_speed = j.value("arm_speed", c.arm_speed);
  c.arm_angular_speed = j.value("arm_angular_speed", c.arm_angular_speed);
  c.path_resolution = j.value("path_resolution", c.path_resolution);
  c.path_angle_resolution = j.value("path_angle_resolution", c.path_angle_resolution);
  c.deadman = Micros{j.value("deadman_us", c.deadman.count())};
  c.tracking_period = Micros{j.value("tracking_period_us", c.tracking_period.count())};
  c.floor_margin = j.value("floor_margin", c.floor_margin);
  c.look_fallback_distance = j.value("look_fallback_distance", c.look_fallback_distance);
  return c;
}

json header_data(const Session& s) {
  const World& w = s.world();
  return {{"schema", kLogSchema},
          {"robot", json::parse(w.robot().source)},
          {"scene", s.full_scene().source},
          {"tick_us", s.tick_length().count()},
          {"world_options",
           {{"battery_hours", w.options().battery_hours}, {"stop_on_contact", w.options().stop_on_contact}}},
          {"controller", to_json(s.controller().config())}};
}

json operator_command_data(const Command& c, const std::string& client, std::uint64_t seq) {
  return {{"source", "operator"}, {"client", client}, {"seq", seq}, {"command", command_to_json(c)}};
}

json admin_command_data(const AdminCommand& c) { return {{"source", "admin"}, {"command", admin_to_json(c)}}; }

json joints_data(const World& w) {
  const JointVector& q = w.joints();
  const BasePose& b = w.base();
  return {{"arms", {{"left", arm_json(q.arm(Side::left))}, {"right", arm_json(q.arm(Side::right))}}},
          {"grippers", {{"left", q.gripper(Side::left)}, {"right", q.gripper(Side::right)}}},
          {"torso", q.torso_lift},
          {"head", {q.head_pan, q.head_tilt}},
          {"base", {b.x, b.y, b.heading}}};
}

json frame_data(const World& w) {
  json objects = json::array();
  for (const auto& o : w.objects()) {
    json e = pose_json(o.pose);
    e["id"] = o.id;
    objects.push_back(std::move(e));
  }
  return {{"camera", pose_json(w.camera())},
          {"width", w.robot().camera.width / 2},
          {"height", w.robot().camera.height / 2},
          {"objects", std::move(objects)}};
}

json diagnostics_data(const World& w) {
  const Diagnostics& d = w.diagnostics();
  return {{"battery", d.battery},
          {"run_stop", d.run_stop},
          {"calibration_ok", d.calibration_ok},
          {"charging", d.charging}};
}

json goal_data(const GoalTransition& g) {
  return {{"goal", g.goal}, {"subsystem", to_string(g.subsystem)}, {"state", to_string(g.state)}, {"reason", g.reason}};
}

json contact_data(const ContactEvent& e) {
  return {{"patch", e.patch},     {"kind", to_string(e.kind)}, {"object", e.object},
          {"phase", to_string(e.phase)}, {"local", vec(e.local)},    {"world", vec(e.world)}};
}

std::unique_ptr<Session> session_from_header(const LogRecord& header) {
  if (header.kind != RecordKind::header) throw std::invalid_argument("not a header record");
  const json& d = header.data;
  if (d.value("schema", 0) != kLogSchema) throw std::invalid_argument("unsupported log schema");
  auto robot = std::make_shared<const RobotDescription>(parse_robot_description(d.at("robot")));
  Scene scene = parse_scene(d.at("scene"), *robot);
  WorldOptions options;
  options.battery_hours = d.at("world_options").value("battery_hours", options.battery_hours);
  options.stop_on_contact = d.at("world_options").value("stop_on_contact", options.stop_on_contact);
  return std::make_unique<Session>(robot, std::move(scene), options,
                                   controller_config_from_json(d.at("controller")),
                                   Micros{d.at("tick_us").get<std::int64_t>()});
}

}  // namespace surrogate
