#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Geometry>

#include "surrogate/kinematics/kinematics.hpp"

namespace surrogate {

enum class Shape { box, cylinder, sphere };

std::string_view to_string(Shape s);
std::optional<Shape> parse_shape(std::string_view s);

/// One primitive of an object, posed in the object frame.
///
/// `size` holds full extents: box (x, y, z); cylinder (diameter, diameter,
/// height) with its axis along z; sphere (diameter, diameter, diameter).
struct Part {
  Shape shape = Shape::box;
  Eigen::Vector3d size = Eigen::Vector3d::Constant(0.05);
  Eigen::Isometry3d offset = Eigen::Isometry3d::Identity();
};

/// Signed distance from a point in the part's own frame (offset not applied).
double part_sdf_local(const Part& part, const Eigen::Vector3d& p);

struct RayHit {
  double t = 0.0;
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();  // outward, same frame as the ray
};

/// Nearest intersection with t > 0 of a ray given in the part's own frame.
std::optional<RayHit> part_raycast_local(const Part& part, const Ray& ray);

/// Axis-aligned bounds of the part in its own frame.
Eigen::AlignedBox3d part_bounds_local(const Part& part);

/// Closest point to `p` on segment [a, b].
Eigen::Vector3d closest_on_segment(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& p);

}  // namespace surrogate
