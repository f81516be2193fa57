#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "surrogate/kinematics/types.hpp"

namespace surrogate {

enum class SkinHost { base, upper_arm_left, upper_arm_right, forearm_left, forearm_right };
enum class PatchKind { arm, base };

std::string_view to_string(SkinHost h);
std::string_view to_string(PatchKind k);

/// Tactile patch geometry in its host link frame.
///
/// Arm patches are capsules around the segment [start, end]. The base patch is
/// the lateral surface of a vertical cylinder (a ring) of `radius` spanning
/// [z_low, z_high] in the base frame.
struct SkinPatchSpec {
  std::string id;
  SkinHost host = SkinHost::base;
  PatchKind kind = PatchKind::base;
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d end = Eigen::Vector3d::Zero();
  double radius = 0.05;
  double z_low = 0.0;
  double z_high = 0.0;
};

struct GripperSpec {
  double aperture_max = 0.09;
  double aperture_min = 0.0;
  double max_velocity = 0.04;   // m/s of aperture change
  double capture_margin = 0.01; // fingertip may sit this far outside an object and still enclose it
  double contact_overlap = 0.002;
};

struct BaseSpec {
  double radius = 0.33;
  double max_linear_velocity = 0.3;
  double max_angular_velocity = 0.5;
};

struct TorsoSpec {
  double travel = 0.30;
  double max_velocity = 0.05;
};

struct RobotDescription {
  std::string name = "surrogate";
  std::array<ArmModel, 2> arms;
  HeadModel head;
  CameraModel camera;        // head RGB camera
  CameraModel depth_camera;  // same mount, depth resolution
  GripperSpec gripper;
  BaseSpec base;
  TorsoSpec torso;
  std::vector<SkinPatchSpec> skin;
  std::string source;  // the JSON document this was parsed from

  const ArmModel& arm(Side s) const { return arms[index(s)]; }
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

RobotDescription parse_robot_description(const nlohmann::json& doc);
RobotDescription load_robot_description(const std::filesystem::path& path);

/// Checks joint limits, torso travel and gripper aperture bounds.
bool within_limits(const RobotDescription& desc, const JointVector& q);

}  // namespace surrogate
