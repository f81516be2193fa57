#include "surrogate/sim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace surrogate {

std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::box: return "box";
    case Shape::cylinder: return "cylinder";
    case Shape::sphere: return "sphere";
  }
  return "box";
}

std::optional<Shape> parse_shape(std::string_view s) {
  if (s == "box") return Shape::box;
  if (s == "cylinder") return Shape::cylinder;
  if (s == "sphere") return Shape::sphere;
  return std::nullopt;
}

double part_sdf_local(const Part& part, const Eigen::Vector3d& p) {
  switch (part.shape) {
    case Shape::box: {
      const Eigen::Vector3d q = p.cwiseAbs() - 0.5 * part.size;
      return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
    }
    case Shape::cylinder: {
      const Eigen::Vector2d d(p.head<2>().norm() - 0.5 * part.size.x(), std::abs(p.z()) - 0.5 * part.size.z());
      return d.cwiseMax(0.0).norm() + std::min(d.maxCoeff(), 0.0);
    }
    case Shape::sphere:
      return p.norm() - 0.5 * part.size.x();
  }
  return std::numeric_limits<double>::infinity();
}

namespace {

std::optional<RayHit> ray_box(const Eigen::Vector3d& half, const Ray& ray) {
  double t0 = -std::numeric_limits<double>::infinity(), t1 = std::numeric_limits<double>::infinity();
  int axis0 = -1, axis1 = -1;
  for (int i = 0; i < 3; ++i) {
    const double o = ray.origin[i], d = ray.direction[i];
    if (std::abs(d) < 1e-15) {
      if (o < -half[i] || o > half[i]) return std::nullopt;
      continue;
    }
    double a = (-half[i] - o) / d, b = (half[i] - o) / d;
    if (a > b) std::swap(a, b);
    if (a > t0) t0 = a, axis0 = i;
    if (b < t1) t1 = b, axis1 = i;
    if (t0 > t1) return std::nullopt;
  }
  RayHit hit;
  int axis;
  if (t0 > 1e-12) {
    hit.t = t0;
    axis = axis0;
  } else if (t1 > 1e-12) {
    hit.t = t1;  // origin inside the box
    axis = axis1;
  } else {
    return std::nullopt;
  }
  if (axis < 0) return std::nullopt;
  hit.normal = Eigen::Vector3d::Zero();
  hit.normal[axis] = ray.at(hit.t)[axis] > 0.0 ? 1.0 : -1.0;
  return hit;
}

std::optional<RayHit> ray_sphere(double r, const Ray& ray) {
  const double b = ray.origin.dot(ray.direction);
  const double c = ray.origin.squaredNorm() - r * r;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  double t = -b - s;
  if (t <= 1e-12) t = -b + s;
  if (t <= 1e-12) return std::nullopt;
  return RayHit{t, ray.at(t).normalized()};
}

std::optional<RayHit> ray_cylinder(double r, double half_h, const Ray& ray) {
  std::optional<RayHit> best;
  auto consider = [&](double t, const Eigen::Vector3d& n) {
    if (t > 1e-12 && (!best || t < best->t)) best = RayHit{t, n};
  };
  const Eigen::Vector2d o = ray.origin.head<2>(), d = ray.direction.head<2>();
  const double a = d.squaredNorm();
  if (a > 1e-18) {
    const double b = o.dot(d), c = o.squaredNorm() - r * r;
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      for (double t : {(-b - s) / a, (-b + s) / a}) {
        const Eigen::Vector3d p = ray.at(t);
        if (std::abs(p.z()) <= half_h) consider(t, Eigen::Vector3d(p.x(), p.y(), 0.0).normalized());
      }
    }
  }
  if (std::abs(ray.direction.z()) > 1e-15) {
    for (double z : {half_h, -half_h}) {
      const double t = (z - ray.origin.z()) / ray.direction.z();
      const Eigen::Vector3d p = ray.at(t);
      if (p.head<2>().squaredNorm() <= r * r) consider(t, Eigen::Vector3d(0, 0, z > 0 ? 1.0 : -1.0));
    }
  }
  return best;
}

}  // namespace

std::optional<RayHit> part_raycast_local(const Part& part, const Ray& ray) {
  switch (part.shape) {
    case Shape::box: return ray_box(0.5 * part.size, ray);
    case Shape::cylinder: return ray_cylinder(0.5 * part.size.x(), 0.5 * part.size.z(), ray);
    case Shape::sphere: return ray_sphere(0.5 * part.size.x(), ray);
  }
  return std::nullopt;
}

Eigen::AlignedBox3d part_bounds_local(const Part& part) {
  const Eigen::Vector3d h = 0.5 * part.size;
  return Eigen::AlignedBox3d(-h, h);
}

Eigen::Vector3d closest_on_segment(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& p) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < 1e-24) return a;
  return a + std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) * ab;
}

}  // namespace surrogate
