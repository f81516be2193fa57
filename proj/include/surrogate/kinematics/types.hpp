#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "surrogate/kinematics/pose.hpp"

namespace surrogate {

enum class Side { left = 0, right = 1 };

constexpr std::size_t index(Side s) { return static_cast<std::size_t>(s); }
constexpr Side other(Side s) { return s == Side::left ? Side::right : Side::left; }
std::string_view to_string(Side s);
Side parse_side(std::string_view text);

constexpr int kArmJoints = 7;
using ArmAngles = Eigen::Matrix<double, kArmJoints, 1>;

/// Every actuated value of the surrogate except the mobile base.
///
/// 14 arm joints + torso lift + head pan/tilt + two gripper apertures = 19 values;
/// with the 3 base coordinates the robot has 22 actuated values. The interface
/// exposes 20 controllable degrees of freedom because each arm is commanded as a
/// 6-DoF gripper pose rather than 7 joints.
struct JointVector {
  std::array<ArmAngles, 2> arms{ArmAngles::Zero(), ArmAngles::Zero()};
  double torso_lift = 0.0;  // meters
  double head_pan = 0.0;
  double head_tilt = 0.0;   // positive looks down
  std::array<double, 2> aperture{0.0, 0.0};  // meters

  ArmAngles& arm(Side s) { return arms[index(s)]; }
  const ArmAngles& arm(Side s) const { return arms[index(s)]; }
  double& gripper(Side s) { return aperture[index(s)]; }
  double gripper(Side s) const { return aperture[index(s)]; }

  bool operator==(const JointVector&) const = default;
};

/// Planar pose of the omnidirectional base in the world frame.
struct BasePose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // (-pi, pi]

  Eigen::Isometry3d isometry() const;
  /// Rotates a base-frame planar vector into the world frame.
  Eigen::Vector2d to_world(const Eigen::Vector2d& v) const;
  bool operator==(const BasePose&) const = default;
};

/// Wraps an angle to (-pi, pi].
double normalize_angle(double a);

struct Joint {
  std::string name;
  Eigen::Isometry3d origin = Eigen::Isometry3d::Identity();  // fixed transform from parent link
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double lower = -std::numbers::pi;
  double upper = std::numbers::pi;
  bool continuous = false;
  double max_velocity = 1.0;  // rad/s

  bool within(double q, double eps = 1e-9) const {
    return continuous ? std::isfinite(q) && q > -std::numbers::pi - eps && q <= std::numbers::pi + eps
                      : q >= lower - eps && q <= upper + eps;
  }
  double clamp(double q) const;
};

/// Serial 7-DoF chain mounted on the torso lift link.
struct ArmModel {
  Eigen::Isometry3d mount = Eigen::Isometry3d::Identity();  // torso frame at zero lift -> shoulder
  std::array<Joint, kArmJoints> joints;
  Eigen::Isometry3d tool = Eigen::Isometry3d::Identity();   // wrist roll link -> gripper frame
  double fingertip_offset = 0.04;                           // along gripper +x (approach axis)
  ArmAngles nominal = ArmAngles::Zero();                    // posture bias for IK null space

  bool within_limits(const ArmAngles& q) const;
  /// Upper bound on the distance from the shoulder pan axis origin to the fingertip.
  double reach() const;
};

/// Pinhole intrinsics plus the camera link mounting on the head tilt frame.
///
/// The camera link frame is x forward (optical axis), y left, z up. Pixel
/// coordinates follow the usual optical convention: u right, v down.
struct CameraModel {
  int width = 1920;
  int height = 1080;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  Eigen::Isometry3d mount = Eigen::Isometry3d::Identity();

  static CameraModel from_fov(int width, int height, double horizontal_fov);
  bool contains(const Eigen::Vector2d& pixel) const {
    return pixel.x() >= 0.0 && pixel.y() >= 0.0 && pixel.x() <= width && pixel.y() <= height;
  }
  void validate() const;
};

struct HeadModel {
  Eigen::Vector3d pan_origin{0.0, 0.0, 1.2};  // base frame at zero torso lift
  Eigen::Vector3d tilt_origin{0.0, 0.0, 0.0};  // pan link frame
  double pan_lower = -2.7;
  double pan_upper = 2.7;
  double tilt_lower = -0.5;
  double tilt_upper = 1.4;
  double max_velocity = 1.5;
};

class KinematicsError : public std::runtime_error {
 public:
  enum class Code { invalid_joints, degenerate_target, pixel_out_of_image };
  KinematicsError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

}  // namespace surrogate
