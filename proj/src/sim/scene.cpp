#include "surrogate/sim/scene.hpp"

#include <fstream>
#include <set>

namespace surrogate {

using nlohmann::json;

namespace {

constexpr double kFiniteStep = 1e-6;

}  // namespace

double WorldObject::sdf(const Eigen::Vector3d& world_point) const {
  const Eigen::Vector3d p = pose.inverse() * world_point;
  double d = std::numeric_limits<double>::infinity();
  for (const Part& part : parts) d = std::min(d, part_sdf_local(part, part.offset.inverse() * p));
  return d;
}

Eigen::Vector3d WorldObject::sdf_gradient(const Eigen::Vector3d& p) const {
  Eigen::Vector3d g;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[i] = kFiniteStep;
    g[i] = (sdf(p + e) - sdf(p - e)) / (2 * kFiniteStep);
  }
  const double n = g.norm();
  return n > 1e-12 ? Eigen::Vector3d(g / n) : Eigen::Vector3d::UnitZ();
}

std::optional<RayHit> WorldObject::raycast(const Ray& world_ray) const {
  const Eigen::Isometry3d T = pose.isometry();
  std::optional<RayHit> best;
  for (const Part& part : parts) {
    const Eigen::Isometry3d P = T * part.offset;
    const Eigen::Isometry3d inv = P.inverse();
    const Ray local{inv * world_ray.origin, inv.linear() * world_ray.direction};
    if (auto h = part_raycast_local(part, local); h && (!best || h->t < best->t)) {
      best = RayHit{h->t, P.linear() * h->normal};
    }
  }
  return best;
}

Eigen::AlignedBox3d WorldObject::local_bounds() const {
  Eigen::AlignedBox3d box;
  for (const Part& part : parts) {
    const Eigen::AlignedBox3d b = part_bounds_local(part);
    for (int c = 0; c < 8; ++c) box.extend(part.offset * b.corner(static_cast<Eigen::AlignedBox3d::CornerType>(c)));
  }
  return box;
}

Eigen::AlignedBox3d WorldObject::bounds() const {
  const Eigen::AlignedBox3d local = local_bounds();
  Eigen::AlignedBox3d box;
  for (int c = 0; c < 8; ++c) box.extend(pose * local.corner(static_cast<Eigen::AlignedBox3d::CornerType>(c)));
  return box;
}

std::optional<Eigen::Vector3d> WorldObject::attachment_world() const {
  if (!attachment) return std::nullopt;
  return pose * *attachment;
}

const WorldObject* Scene::find(const std::string& id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

const SceneItem* Scene::item(const std::string& id) const {
  for (const auto& i : items)
    if (i.id == id) return &i;
  return nullptr;
}

namespace {

Eigen::Vector3d vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw SceneError(path, "expected [x, y, z]");
  for (const auto& e : v)
    if (!e.is_number()) throw SceneError(path, "expected numbers");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SceneError(path, "expected a number");
  return v.get<double>();
}

// {"xyz": [...], "yaw": rad} or {"xyz": [...], "rpy": [...]}
Eigen::Isometry3d placement(const json& v, const std::string& path) {
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  if (!v.is_object()) throw SceneError(path, "expected {xyz, yaw|rpy}");
  if (v.contains("xyz")) T.translation() = vec3(v["xyz"], path + "/xyz");
  if (v.contains("yaw")) T.rotate(Eigen::AngleAxisd(number(v["yaw"], path + "/yaw"), Eigen::Vector3d::UnitZ()));
  if (v.contains("rpy")) {
    const Eigen::Vector3d r = vec3(v["rpy"], path + "/rpy");
    T.rotate(Eigen::AngleAxisd(r.z(), Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(r.y(), Eigen::Vector3d::UnitY()) *
             Eigen::AngleAxisd(r.x(), Eigen::Vector3d::UnitX()));
  }
  return T;
}

Part part(const json& v, const std::string& path) {
  Part p;
  if (!v.contains("shape") || !v["shape"].is_string()) throw SceneError(path + "/shape", "missing shape");
  const auto s = parse_shape(v["shape"].get<std::string>());
  if (!s) throw SceneError(path + "/shape", "unknown shape '" + v["shape"].get<std::string>() + "'");
  p.shape = *s;
  if (!v.contains("size")) throw SceneError(path + "/size", "missing field");
  const json& size = v["size"];
  if (p.shape == Shape::box) {
    p.size = vec3(size, path + "/size");
  } else if (p.shape == Shape::cylinder) {
    if (!size.is_array() || size.size() != 2) throw SceneError(path + "/size", "expected [diameter, height]");
    const double d = number(size[0], path + "/size/0"), h = number(size[1], path + "/size/1");
    p.size = {d, d, h};
  } else {
    const double d = number(size, path + "/size");
    p.size = Eigen::Vector3d::Constant(d);
  }
  if ((p.size.array() <= 0.0).any()) throw SceneError(path + "/size", "dimensions must be positive");
  if (v.contains("at")) p.offset = placement(v["at"], path + "/at");
  return p;
}

WorldObject object(const json& v, const std::string& path) {
  WorldObject o;
  if (!v.contains("id") || !v["id"].is_string()) throw SceneError(path + "/id", "missing id");
  o.id = v["id"].get<std::string>();
  if (v.contains("parts")) {
    const json& parts = v["parts"];
    if (!parts.is_array() || parts.empty()) throw SceneError(path + "/parts", "expected a non-empty list");
    for (std::size_t i = 0; i < parts.size(); ++i) o.parts.push_back(part(parts[i], path + "/parts/" + std::to_string(i)));
  } else {
    o.parts.push_back(part(v, path));
  }
  if (!v.contains("pose")) throw SceneError(path + "/pose", "missing field");
  o.pose = Pose::from_isometry(placement(v["pose"], path + "/pose"));
  const std::string mass = v.value("mass", "fixed");
  if (mass == "liftable") o.mass = MassClass::liftable;
  else if (mass == "fixed") o.mass = MassClass::fixed;
  else throw SceneError(path + "/mass", "expected 'liftable' or 'fixed'");
  const Eigen::Vector3d extent = o.local_bounds().sizes();
  o.grasp_width = v.contains("grasp_width") ? number(v["grasp_width"], path + "/grasp_width") : extent.head<2>().minCoeff();
  if (!(o.grasp_width > 0.0) || o.grasp_width > extent.maxCoeff() + 1e-12)
    throw SceneError(path + "/grasp_width", "must be positive and no larger than the object");
  if (v.contains("attachment")) o.attachment = vec3(v["attachment"], path + "/attachment");
  if (v.contains("color")) {
    const json& c = v["color"];
    if (!c.is_array() || c.size() != 3) throw SceneError(path + "/color", "expected [r, g, b]");
    for (int i = 0; i < 3; ++i) o.color[i] = static_cast<std::uint8_t>(std::clamp(c[i].get<int>(), 0, 255));
  }
  return o;
}

std::map<std::string, Eigen::Vector3d> anchors(const json& v, const std::string& path) {
  std::map<std::string, Eigen::Vector3d> out;
  if (!v.is_object()) throw SceneError(path, "expected an object of named points");
  for (const auto& [k, p] : v.items()) out[k] = vec3(p, path + "/" + k);
  return out;
}

RobotStart robot_start(const json& v, const RobotDescription& robot) {
  RobotStart s;
  for (Side side : {Side::left, Side::right}) s.q.arm(side) = robot.arm(side).nominal;
  s.q.torso_lift = 0.0;
  if (v.is_null()) return s;
  const std::string path = "/robot";
  if (v.contains("base")) {
    const json& b = v["base"];
    if (!b.is_array() || b.size() != 3) throw SceneError(path + "/base", "expected [x, y, heading]");
    s.base = {b[0].get<double>(), b[1].get<double>(), normalize_angle(b[2].get<double>())};
  }
  if (v.contains("torso_lift")) s.q.torso_lift = number(v["torso_lift"], path + "/torso_lift");
  if (v.contains("head")) {
    const json& h = v["head"];
    if (!h.is_array() || h.size() != 2) throw SceneError(path + "/head", "expected [pan, tilt]");
    s.q.head_pan = h[0].get<double>();
    s.q.head_tilt = h[1].get<double>();
  }
  if (v.contains("arms")) {
    for (Side side : {Side::left, Side::right}) {
      const std::string key(to_string(side));
      if (!v["arms"].contains(key)) continue;
      const json& a = v["arms"][key];
      if (a.is_string() && a.get<std::string>() == "nominal") continue;
      if (!a.is_array() || a.size() != kArmJoints) throw SceneError(path + "/arms/" + key, "expected 7 angles or \"nominal\"");
      for (int i = 0; i < kArmJoints; ++i) s.q.arm(side)[i] = a[i].get<double>();
    }
  }
  if (v.contains("aperture")) {
    const json& a = v["aperture"];
    if (!a.is_array() || a.size() != 2) throw SceneError(path + "/aperture", "expected [left, right]");
    s.q.aperture = {a[0].get<double>(), a[1].get<double>()};
  }
  if (!within_limits(robot, s.q)) throw SceneError(path, "start configuration outside joint limits");
  return s;
}

WorldObject mirrored(WorldObject o) {
  // Reflection y -> -y composed with a flip of the object's y axis keeps the
  // frame right-handed; symmetric parts stay the same shape.
  const Eigen::Matrix3d M = Eigen::Vector3d(1, -1, 1).asDiagonal();
  const Eigen::Matrix3d R = M * o.pose.orientation.toRotationMatrix() * M;
  o.pose = Pose(M * o.pose.position, Eigen::Quaterniond(R));
  for (Part& p : o.parts) {
    p.offset.translation() = M * p.offset.translation();
    p.offset.linear() = M * p.offset.linear() * M;
  }
  if (o.attachment) o.attachment = M * *o.attachment;
  return o;
}

}  // namespace

Scene parse_scene(const json& doc, const RobotDescription& robot) {
  if (!doc.is_object()) throw SceneError("", "scene must be a JSON object");
  Scene s;
  s.source = doc;
  s.name = doc.value("name", "scene");
  s.start = robot_start(doc.contains("robot") ? doc["robot"] : json(), robot);

  std::set<std::string> ids;
  auto take_id = [&](const std::string& id, const std::string& path) {
    if (!ids.insert(id).second) throw SceneError(path, "duplicate object id '" + id + "'");
  };
  if (doc.contains("objects")) {
    const json& objs = doc["objects"];
    if (!objs.is_array()) throw SceneError("/objects", "expected a list");
    for (std::size_t i = 0; i < objs.size(); ++i) {
      const std::string path = "/objects/" + std::to_string(i);
      WorldObject o = object(objs[i], path);
      take_id(o.id, path + "/id");
      if (objs[i].contains("group")) s.object_group[o.id] = objs[i]["group"].get<std::string>();
      s.objects.push_back(std::move(o));
    }
  }
  if (doc.contains("anchors")) s.anchors = anchors(doc["anchors"], "/anchors");
  if (doc.contains("items")) {
    const json& items = doc["items"];
    std::set<std::string> item_ids;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string path = "/items/" + std::to_string(i);
      SceneItem it;
      if (!items[i].contains("id")) throw SceneError(path + "/id", "missing id");
      it.id = items[i]["id"].get<std::string>();
      if (!item_ids.insert(it.id).second) throw SceneError(path + "/id", "duplicate item id '" + it.id + "'");
      it.group = items[i].value("group", "");
      if (items[i].contains("objects")) {
        const json& objs = items[i]["objects"];
        for (std::size_t k = 0; k < objs.size(); ++k) {
          const std::string op = path + "/objects/" + std::to_string(k);
          WorldObject o = object(objs[k], op);
          take_id(o.id, op + "/id");
          it.objects.push_back(std::move(o));
        }
      }
      if (items[i].contains("anchors")) it.anchors = anchors(items[i]["anchors"], path + "/anchors");
      s.items.push_back(std::move(it));
    }
  }
  return s;
}

Scene load_scene(const std::filesystem::path& path, const RobotDescription& robot) {
  std::ifstream in(path);
  if (!in) throw SceneError("", "cannot open scene " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SceneError("", path.string() + ": " + e.what());
  }
  return parse_scene(doc, robot);
}

Scene select_item(const Scene& scene, const std::string& item_id, Side side) {
  const SceneItem* it = scene.item(item_id);
  if (!it) throw SceneError("/items", "unknown item '" + item_id + "'");
  Scene out;
  out.name = scene.name + ":" + item_id;
  out.start = scene.start;
  out.source = scene.source;
  out.anchors = scene.anchors;
  for (const auto& o : scene.objects) {
    const auto g = scene.object_group.find(o.id);
    if (g == scene.object_group.end() || g->second == it->group) out.objects.push_back(o);
  }
  for (const auto& o : it->objects) out.objects.push_back(o);
  for (const auto& [k, v] : it->anchors) out.anchors[k] = v;
  if (side == Side::left) {
    for (auto& o : out.objects) o = mirrored(o);
    for (auto& [k, v] : out.anchors) v.y() = -v.y();
  }
  return out;
}

json object_to_json(const WorldObject& o) {
  json parts = json::array();
  for (const Part& p : o.parts) {
    const Eigen::Quaterniond q(p.offset.linear());
    parts.push_back({{"shape", to_string(p.shape)},
                     {"size", {p.size.x(), p.size.y(), p.size.z()}},
                     {"xyz", {p.offset.translation().x(), p.offset.translation().y(), p.offset.translation().z()}},
                     {"quat", {q.w(), q.x(), q.y(), q.z()}}});
  }
  json j = {{"id", o.id},
            {"shape", o.shape_label()},
            {"mass", o.mass == MassClass::liftable ? "liftable" : "fixed"},
            {"grasp_width", o.grasp_width},
            {"color", {o.color[0], o.color[1], o.color[2]}},
            {"parts", parts}};
  if (o.attachment) j["attachment"] = {o.attachment->x(), o.attachment->y(), o.attachment->z()};
  return j;
}

}  // namespace surrogate
