#include "surrogate/kinematics/robot_description.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace surrogate {

using nlohmann::json;

std::string_view to_string(SkinHost h) {
  switch (h) {
    case SkinHost::base: return "base";
    case SkinHost::upper_arm_left: return "upper_arm_left";
    case SkinHost::upper_arm_right: return "upper_arm_right";
    case SkinHost::forearm_left: return "forearm_left";
    case SkinHost::forearm_right: return "forearm_right";
  }
  return "base";
}

std::string_view to_string(PatchKind k) { return k == PatchKind::arm ? "arm" : "base"; }

namespace {

SkinHost parse_host(const std::string& s, const std::string& field) {
  for (auto h : {SkinHost::base, SkinHost::upper_arm_left, SkinHost::upper_arm_right, SkinHost::forearm_left,
                 SkinHost::forearm_right})
    if (to_string(h) == s) return h;
  throw ConfigError(field, "unknown host link '" + s + "'");
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError(path + "/" + key, "missing field");
  return obj.at(key);
}

double number(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) throw ConfigError(path + "/" + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return number(obj, key, path);
}

Eigen::Vector3d vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(path, "expected [x, y, z]");
  for (const auto& e : v)
    if (!e.is_number()) throw ConfigError(path, "expected numbers");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::pair<double, double> interval(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(path, "expected [lower, upper]");
  const double lo = v[0].get<double>(), hi = v[1].get<double>();
  if (!(lo <= hi)) throw ConfigError(path, "lower bound exceeds upper bound");
  return {lo, hi};
}

// {"xyz": [...], "rpy": [...]} or a bare [x, y, z] translation.
Eigen::Isometry3d transform(const json& v, const std::string& path) {
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  if (v.is_array()) {
    T.translation() = vec3(v, path);
    return T;
  }
  if (!v.is_object()) throw ConfigError(path, "expected a transform");
  if (v.contains("xyz")) T.translation() = vec3(v["xyz"], path + "/xyz");
  if (v.contains("rpy")) {
    const Eigen::Vector3d rpy = vec3(v["rpy"], path + "/rpy");
    T.linear() = (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
                  Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
                  Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
                     .toRotationMatrix();
  }
  return T;
}

CameraModel camera(const json& v, const std::string& path) {
  const int w = static_cast<int>(number(v, "width", path));
  const int h = static_cast<int>(number(v, "height", path));
  CameraModel c = CameraModel::from_fov(w, h, number_or(v, "hfov_deg", 60.0, path) * std::numbers::pi / 180.0);
  c.fx = number_or(v, "fx", c.fx, path);
  c.fy = number_or(v, "fy", c.fx, path);
  c.cx = number_or(v, "cx", c.cx, path);
  c.cy = number_or(v, "cy", c.cy, path);
  if (v.contains("mount")) c.mount = transform(v["mount"], path + "/mount");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  return c;
}

ArmModel arm(const json& v, const std::string& path) {
  ArmModel a;
  a.mount = transform(require(v, "mount", path), path + "/mount");
  const json& joints = require(v, "joints", path);
  if (!joints.is_array() || joints.size() != kArmJoints)
    throw ConfigError(path + "/joints", "expected exactly 7 joints");
  for (int i = 0; i < kArmJoints; ++i) {
    const std::string jp = path + "/joints/" + std::to_string(i);
    const json& j = joints[i];
    Joint& out = a.joints[i];
    out.name = j.value("name", "joint" + std::to_string(i));
    if (j.contains("origin")) out.origin = transform(j["origin"], jp + "/origin");
    out.axis = vec3(require(j, "axis", jp), jp + "/axis");
    if (out.axis.norm() < 1e-9) throw ConfigError(jp + "/axis", "zero-length axis");
    out.axis.normalize();
    out.continuous = j.value("continuous", false);
    if (!out.continuous) std::tie(out.lower, out.upper) = interval(require(j, "limits", jp), jp + "/limits");
    out.max_velocity = number_or(j, "max_velocity", 1.0, jp);
  }
  a.tool = transform(require(v, "tool", path), path + "/tool");
  a.fingertip_offset = number(v, "fingertip_offset", path);
  if (!(a.fingertip_offset > 0.0)) throw ConfigError(path + "/fingertip_offset", "must be positive");
  if (v.contains("nominal")) {
    const json& n = v["nominal"];
    if (!n.is_array() || n.size() != kArmJoints) throw ConfigError(path + "/nominal", "expected 7 angles");
    for (int i = 0; i < kArmJoints; ++i) a.nominal[i] = n[i].get<double>();
    if (!a.within_limits(a.nominal)) throw ConfigError(path + "/nominal", "outside joint limits");
  }
  return a;
}

}  // namespace

RobotDescription parse_robot_description(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "robot description must be a JSON object");
  RobotDescription d;
  d.name = doc.value("name", "surrogate");

  if (doc.contains("torso")) {
    d.torso.travel = number(doc["torso"], "travel", "/torso");
    d.torso.max_velocity = number_or(doc["torso"], "max_velocity", d.torso.max_velocity, "/torso");
  }
  if (doc.contains("base")) {
    const json& b = doc["base"];
    d.base.radius = number_or(b, "radius", d.base.radius, "/base");
    d.base.max_linear_velocity = number_or(b, "max_linear_velocity", d.base.max_linear_velocity, "/base");
    d.base.max_angular_velocity = number_or(b, "max_angular_velocity", d.base.max_angular_velocity, "/base");
  }
  if (doc.contains("gripper")) {
    const json& g = doc["gripper"];
    d.gripper.aperture_max = number_or(g, "aperture_max", d.gripper.aperture_max, "/gripper");
    d.gripper.max_velocity = number_or(g, "max_velocity", d.gripper.max_velocity, "/gripper");
    d.gripper.capture_margin = number_or(g, "capture_margin", d.gripper.capture_margin, "/gripper");
    d.gripper.contact_overlap = number_or(g, "contact_overlap", d.gripper.contact_overlap, "/gripper");
  }

  const json& head = require(doc, "head", "");
  d.head.pan_origin = vec3(require(head, "pan_origin", "/head"), "/head/pan_origin");
  if (head.contains("tilt_origin")) d.head.tilt_origin = vec3(head["tilt_origin"], "/head/tilt_origin");
  if (head.contains("pan_limits"))
    std::tie(d.head.pan_lower, d.head.pan_upper) = interval(head["pan_limits"], "/head/pan_limits");
  if (head.contains("tilt_limits"))
    std::tie(d.head.tilt_lower, d.head.tilt_upper) = interval(head["tilt_limits"], "/head/tilt_limits");
  d.head.max_velocity = number_or(head, "max_velocity", d.head.max_velocity, "/head");

  const json& cams = require(doc, "cameras", "");
  d.camera = camera(require(cams, "rgb", "/cameras"), "/cameras/rgb");
  d.depth_camera = cams.contains("depth") ? camera(cams["depth"], "/cameras/depth") : d.camera;
  if (!cams.contains("depth") || !cams["depth"].contains("mount")) d.depth_camera.mount = d.camera.mount;

  const json& arms = require(doc, "arms", "");
  d.arms[index(Side::left)] = arm(require(arms, "left", "/arms"), "/arms/left");
  d.arms[index(Side::right)] = arm(require(arms, "right", "/arms"), "/arms/right");

  if (doc.contains("skin")) {
    const json& skin = doc["skin"];
    for (std::size_t i = 0; i < skin.size(); ++i) {
      const std::string sp = "/skin/" + std::to_string(i);
      const json& p = skin[i];
      SkinPatchSpec s;
      s.id = require(p, "id", sp).get<std::string>();
      s.host = parse_host(require(p, "host", sp).get<std::string>(), sp + "/host");
      s.kind = s.host == SkinHost::base ? PatchKind::base : PatchKind::arm;
      if (p.contains("kind") && p["kind"].get<std::string>() != to_string(s.kind))
        throw ConfigError(sp + "/kind", "patch kind must be 'base' exactly when hosted on the base");
      s.radius = number(p, "radius", sp);
      if (s.kind == PatchKind::arm) {
        s.start = vec3(require(p, "start", sp), sp + "/start");
        s.end = vec3(require(p, "end", sp), sp + "/end");
      } else {
        std::tie(s.z_low, s.z_high) = interval(require(p, "z", sp), sp + "/z");
      }
      d.skin.push_back(std::move(s));
    }
  }
  d.source = doc.dump();
  return d;
}

RobotDescription load_robot_description(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open robot description " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
  return parse_robot_description(doc);
}

bool within_limits(const RobotDescription& desc, const JointVector& q) {
  for (Side s : {Side::left, Side::right}) {
    if (!desc.arm(s).within_limits(q.arm(s))) return false;
    if (q.gripper(s) < -1e-12 || q.gripper(s) > desc.gripper.aperture_max + 1e-12) return false;
  }
  if (q.torso_lift < -1e-12 || q.torso_lift > desc.torso.travel + 1e-12) return false;
  const auto& h = desc.head;
  return q.head_pan >= h.pan_lower - 1e-12 && q.head_pan <= h.pan_upper + 1e-12 &&
         q.head_tilt >= h.tilt_lower - 1e-12 && q.head_tilt <= h.tilt_upper + 1e-12;
}

}  // namespace surrogate
