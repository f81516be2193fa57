#pragma once

#include <array>
#include <numbers>
#include <optional>

#include "surrogate/kinematics/robot_description.hpp"
#include "surrogate/kinematics/types.hpp"

namespace surrogate {

// Frames: world (z up, floor at z = 0), base (origin on the floor under the
// base center, x forward, y left), torso (base frame raised by the lift).

/// Gripper frame pose in the base frame. Throws KinematicsError(invalid_joints)
/// when the arm joints or torso lift are out of limits.
Pose forward_kinematics(const ArmModel& arm, const JointVector& q, Side side);

/// Midpoint between the fingertips in the base frame.
Eigen::Vector3d fingertip_point(const ArmModel& arm, const JointVector& q, Side side);

/// Link frames after each joint (index 0..6) plus the gripper frame (index 7),
/// all in the base frame. No limit check.
std::array<Eigen::Isometry3d, kArmJoints + 1> arm_link_frames(const ArmModel& arm, const ArmAngles& q,
                                                              double torso_lift);

/// Geometric Jacobian of the gripper frame (rows: linear, angular) in the base frame.
Eigen::Matrix<double, 6, kArmJoints> arm_jacobian(const ArmModel& arm, const ArmAngles& q, double torso_lift);

struct IkOptions {
  double position_tolerance = 1e-3;
  double orientation_tolerance = 0.5 * std::numbers::pi / 180.0;
  int max_iterations = 200;
  double damping = 0.01;
  double posture_gain = 0.05;
  double max_step = 0.3;  // rad, per iteration
  int restarts = 30;      // additional seeds tried after the attempt from q_current
};

enum class IkStatus { converged, unreachable };

struct IkResult {
  IkStatus status = IkStatus::unreachable;
  JointVector q;
  double position_error = 0.0;
  double orientation_error = 0.0;
  int iterations = 0;

  bool ok() const { return status == IkStatus::converged; }
};

/// Damped least-squares IK with null-space bias toward the arm's nominal posture.
///
/// Only the arm of `side` changes; every other entry of `q_current` is copied.
/// A goal already satisfied by `q_current` returns it untouched.
IkResult solve_ik_step(const ArmModel& arm, const JointVector& q_current, Side side, const Pose& goal,
                       const IkOptions& options = {});

struct PanTilt {
  double pan = 0.0;
  double tilt = 0.0;
  bool clamped = false;
};

/// Camera link pose in the base frame for the given head joints.
Eigen::Isometry3d camera_in_base(const HeadModel& head, const CameraModel& camera, const JointVector& q);

/// Camera link pose in the world frame.
Pose camera_pose(const RobotDescription& desc, const BasePose& base, const JointVector& q);

/// Pan/tilt that put `target` (base frame) on the optical axis, clamped to the head limits.
PanTilt head_look_at(const HeadModel& head, const CameraModel& camera, const JointVector& q,
                     const Eigen::Vector3d& target);

enum class ScreenEdge { left, right, top, bottom, top_left, top_right, bottom_left, bottom_right };
std::string_view to_string(ScreenEdge e);

struct Projection {
  bool on_screen = false;
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();  // valid when on_screen
  ScreenEdge edge = ScreenEdge::left;               // valid when !on_screen
};

/// Projects a point (same frame as `camera_pose`) to a pixel, or to the
/// nearest screen edge/corner when it is outside the view or behind the camera.
Projection project_to_pixel(const CameraModel& camera, const Pose& camera_pose, const Eigen::Vector3d& point);

struct Ray {
  Eigen::Vector3d origin;
  Eigen::Vector3d direction;  // unit length

  Eigen::Vector3d at(double t) const { return origin + t * direction; }
};

/// Back-projected ray through a pixel. Throws pixel_out_of_image.
Ray pixel_ray(const CameraModel& camera, const Pose& camera_pose, const Eigen::Vector2d& pixel);

/// Intersection of the pixel ray with the z = 0 plane, or nullopt when the
/// ray is parallel to or points away from the ground.
std::optional<Eigen::Vector3d> pixel_to_ground(const CameraModel& camera, const Pose& camera_pose,
                                               const Eigen::Vector2d& pixel);

}  // namespace surrogate
