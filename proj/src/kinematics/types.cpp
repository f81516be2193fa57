#include "surrogate/kinematics/types.hpp"

#include <algorithm>

namespace surrogate {

std::string_view to_string(Side s) { return s == Side::left ? "left" : "right"; }

Side parse_side(std::string_view text) {
  if (text == "left" || text == "L" || text == "l") return Side::left;
  if (text == "right" || text == "R" || text == "r") return Side::right;
  throw std::invalid_argument("unknown side '" + std::string(text) + "'");
}

double normalize_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);  // [-pi, pi]
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

Eigen::Isometry3d BasePose::isometry() const {
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  T.linear() = Eigen::AngleAxisd(heading, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  T.translation() = Eigen::Vector3d(x, y, 0.0);
  return T;
}

Eigen::Vector2d BasePose::to_world(const Eigen::Vector2d& v) const {
  const double c = std::cos(heading), s = std::sin(heading);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

double Joint::clamp(double q) const {
  if (continuous) return normalize_angle(q);
  return std::clamp(q, lower, upper);
}

bool ArmModel::within_limits(const ArmAngles& q) const {
  for (int i = 0; i < kArmJoints; ++i)
    if (!joints[i].within(q[i])) return false;
  return true;
}

double ArmModel::reach() const {
  double r = 0.0;
  for (const auto& j : joints) r += j.origin.translation().norm();
  return r + tool.translation().norm() + fingertip_offset;
}

CameraModel CameraModel::from_fov(int width, int height, double horizontal_fov) {
  CameraModel c;
  c.width = width;
  c.height = height;
  c.fx = 0.5 * width / std::tan(0.5 * horizontal_fov);
  c.fy = c.fx;
  c.cx = 0.5 * width;
  c.cy = 0.5 * height;
  return c;
}

void CameraModel::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("camera resolution must be positive");
  if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("camera focal lengths must be positive");
  if (cx < 0.0 || cx > width || cy < 0.0 || cy > height)
    throw std::invalid_argument("camera principal point must lie inside the image");
}

}  // namespace surrogate
