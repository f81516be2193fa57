#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "surrogate/sim/geometry.hpp"

namespace surrogate {

enum class MassClass { liftable, fixed };

using Color = std::array<std::uint8_t, 3>;

struct WorldObject {
  std::string id;
  std::vector<Part> parts;  // one part unless composite
  Pose pose;
  MassClass mass = MassClass::fixed;
  double grasp_width = 0.0;
  std::optional<Eigen::Vector3d> attachment;  // object frame, e.g. the straw tip
  Color color{180, 180, 180};

  bool composite() const { return parts.size() != 1; }
  std::string_view shape_label() const { return composite() ? "composite" : to_string(parts.front().shape); }

  double sdf(const Eigen::Vector3d& world_point) const;
  Eigen::Vector3d sdf_gradient(const Eigen::Vector3d& world_point) const;
  std::optional<RayHit> raycast(const Ray& world_ray) const;
  Eigen::AlignedBox3d bounds() const;       // world frame
  Eigen::AlignedBox3d local_bounds() const; // object frame
  std::optional<Eigen::Vector3d> attachment_world() const;
};

struct RobotStart {
  BasePose base;
  JointVector q;
};

/// Objects and anchors belonging to one assessment item; only one item is
/// placed in the world at a time.
struct SceneItem {
  std::string id;
  std::string group;  // fixtures tagged with this group are placed along with the item
  std::vector<WorldObject> objects;
  std::map<std::string, Eigen::Vector3d> anchors;
};

struct Scene {
  std::string name;
  RobotStart start;
  std::vector<WorldObject> objects;
  std::map<std::string, std::string> object_group;  // fixture id -> group, absent = always placed
  std::map<std::string, Eigen::Vector3d> anchors;   // world frame task points
  std::vector<SceneItem> items;
  nlohmann::json source;

  const WorldObject* find(const std::string& id) const;
  const SceneItem* item(const std::string& id) const;
};

class SceneError : public std::runtime_error {
 public:
  SceneError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Parses a scene document. The robot description supplies nominal arm postures.
Scene parse_scene(const nlohmann::json& doc, const RobotDescription& robot);
Scene load_scene(const std::filesystem::path& path, const RobotDescription& robot);

/// Concrete scene for one item: ungrouped fixtures, the item's group fixtures
/// and the item objects. Item layouts are authored for the right arm and are
/// mirrored across the robot's sagittal plane (y -> -y) for the left arm.
Scene select_item(const Scene& scene, const std::string& item_id, Side side);

nlohmann::json object_to_json(const WorldObject& o);

}  // namespace surrogate
