#pragma once

#include <Eigen/Geometry>

namespace surrogate {

/// Rigid transform stored as translation + unit quaternion.
template <typename Scalar>
struct BasicPose {
  using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
  using Quaternion = Eigen::Quaternion<Scalar>;
  using Isometry = Eigen::Transform<Scalar, 3, Eigen::Isometry>;

  Vector3 position = Vector3::Zero();
  Quaternion orientation = Quaternion::Identity();

  BasicPose() = default;
  BasicPose(const Vector3& p, const Quaternion& q) : position(p), orientation(q.normalized()) {}

  static BasicPose from_isometry(const Isometry& T) {
    return BasicPose(T.translation(), Quaternion(T.linear()));
  }

  Isometry isometry() const {
    Isometry T = Isometry::Identity();
    T.linear() = orientation.toRotationMatrix();
    T.translation() = position;
    return T;
  }

  BasicPose operator*(const BasicPose& rhs) const {
    return BasicPose(position + orientation * rhs.position, orientation * rhs.orientation);
  }

  Vector3 operator*(const Vector3& p) const { return position + orientation * p; }

  BasicPose inverse() const {
    const Quaternion inv = orientation.conjugate();
    return BasicPose(-(inv * position), inv);
  }
};

using Pose = BasicPose<double>;

/// Geodesic angle between two orientations, in [0, pi].
template <typename Scalar>
Scalar angular_distance(const Eigen::Quaternion<Scalar>& a, const Eigen::Quaternion<Scalar>& b) {
  return a.angularDistance(b);
}

/// Rotation vector (axis * angle) taking `from` to `to`, expressed in the outer frame.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> rotation_error(const Eigen::Quaternion<Scalar>& to,
                                           const Eigen::Quaternion<Scalar>& from) {
  Eigen::Quaternion<Scalar> delta = to * from.conjugate();
  if (delta.w() < Scalar(0)) delta.coeffs() = -delta.coeffs();
  const Eigen::AngleAxis<Scalar> aa(delta);
  return aa.axis() * aa.angle();
}

}  // namespace surrogate
