#include "surrogate/kinematics/kinematics.hpp"

#include <algorithm>
#include <random>

#include <Eigen/Dense>

namespace surrogate {

namespace {

Eigen::Isometry3d lift_frame(double torso_lift) {
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  T.translation().z() = torso_lift;
  return T;
}

void check_arm(const ArmModel& arm, const JointVector& q, Side side) {
  if (!arm.within_limits(q.arm(side)))
    throw KinematicsError(KinematicsError::Code::invalid_joints,
                          std::string(to_string(side)) + " arm joints outside limits");
  if (!std::isfinite(q.torso_lift) || q.torso_lift < -1e-12)
    throw KinematicsError(KinematicsError::Code::invalid_joints, "torso lift outside limits");
}

double angle_diff(const Joint& j, double to, double from) {
  return j.continuous ? normalize_angle(to - from) : to - from;
}

struct TaskError {
  Eigen::Matrix<double, 6, 1> e;
  double position = 0.0;
  double orientation = 0.0;
};

TaskError task_error(const Eigen::Isometry3d& T, const Pose& goal) {
  TaskError out;
  out.e.head<3>() = goal.position - T.translation();
  const Eigen::Quaterniond current(T.linear());
  out.e.tail<3>() = rotation_error(goal.orientation, current);
  out.position = out.e.head<3>().norm();
  out.orientation = out.e.tail<3>().norm();
  return out;
}

// Orientation residuals are weighted so that one radian counts like 20 cm.
constexpr double kRotationWeight = 0.2;

double cost(const TaskError& err) { return err.position + kRotationWeight * err.orientation; }

struct Attempt {
  ArmAngles q;
  TaskError err;
  int iterations = 0;
};

Attempt dls_attempt(const ArmModel& arm, ArmAngles q, double lift, const Pose& goal, const IkOptions& opt) {
  const double tight_pos = 0.1 * opt.position_tolerance;
  const double tight_rot = 0.1 * opt.orientation_tolerance;
  Eigen::Matrix<double, 6, 1> weights;
  weights << 1, 1, 1, kRotationWeight, kRotationWeight, kRotationWeight;

  double lambda = opt.damping;
  TaskError err = task_error(arm_link_frames(arm, q, lift).back(), goal);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (err.position < tight_pos && err.orientation < tight_rot) break;

    const Eigen::Matrix<double, 6, kArmJoints> J_full = weights.asDiagonal() * arm_jacobian(arm, q, lift);
    const Eigen::Matrix<double, 6, 1> e = weights.asDiagonal() * err.e;

    // The posture bias fades out close to the goal so it cannot stall the final approach.
    const double fade = std::min(1.0, cost(err) / 0.02);
    ArmAngles bias;
    for (int i = 0; i < kArmJoints; ++i)
      bias[i] = fade * opt.posture_gain * angle_diff(arm.joints[i], arm.nominal[i], q[i]);

    // Joints pushed past a limit are frozen and the step is recomputed without them.
    Eigen::Matrix<double, 6, kArmJoints> J = J_full;
    ArmAngles dq;
    for (int pass = 0; pass < kArmJoints; ++pass) {
      const Eigen::Matrix<double, 6, 6> A =
          J * J.transpose() + lambda * lambda * Eigen::Matrix<double, 6, 6>::Identity();
      const Eigen::LDLT<Eigen::Matrix<double, 6, 6>> ldlt(A);
      dq = J.transpose() * ldlt.solve(e);
      ArmAngles b = bias;
      for (int i = 0; i < kArmJoints; ++i)
        if (J.col(i).isZero(0.0)) b[i] = 0.0;
      dq += b - J.transpose() * ldlt.solve(J * b);

      bool frozen = false;
      for (int i = 0; i < kArmJoints; ++i) {
        const Joint& j = arm.joints[i];
        if (j.continuous || J.col(i).isZero(0.0)) continue;
        if ((q[i] + dq[i] > j.upper && q[i] >= j.upper - 1e-9) || (q[i] + dq[i] < j.lower && q[i] <= j.lower + 1e-9)) {
          J.col(i).setZero();
          frozen = true;
        }
      }
      if (!frozen) break;
    }

    const double largest = dq.cwiseAbs().maxCoeff();
    if (largest > opt.max_step) dq *= opt.max_step / largest;

    ArmAngles candidate;
    for (int i = 0; i < kArmJoints; ++i) candidate[i] = arm.joints[i].clamp(q[i] + dq[i]);
    const TaskError next = task_error(arm_link_frames(arm, candidate, lift).back(), goal);
    if (cost(next) < cost(err)) {
      q = candidate;
      err = next;
      lambda = std::max(opt.damping, 0.5 * lambda);
    } else {
      lambda *= 2.0;  // diverging: damp harder and retry from the same q
      if (lambda > 1e3) break;
    }
  }
  return {q, err, it};
}

ArmAngles random_seed(const ArmModel& arm, std::mt19937_64& rng) {
  ArmAngles q;
  for (int i = 0; i < kArmJoints; ++i) {
    const Joint& j = arm.joints[i];
    const double lo = j.continuous ? -std::numbers::pi : j.lower;
    const double hi = j.continuous ? std::numbers::pi : j.upper;
    q[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  return q;
}

}  // namespace

std::array<Eigen::Isometry3d, kArmJoints + 1> arm_link_frames(const ArmModel& arm, const ArmAngles& q,
                                                              double torso_lift) {
  std::array<Eigen::Isometry3d, kArmJoints + 1> frames;
  Eigen::Isometry3d T = lift_frame(torso_lift) * arm.mount;
  for (int i = 0; i < kArmJoints; ++i) {
    const Joint& j = arm.joints[i];
    T = T * j.origin * Eigen::AngleAxisd(q[i], j.axis);
    frames[i] = T;
  }
  frames[kArmJoints] = T * arm.tool;
  return frames;
}

Eigen::Matrix<double, 6, kArmJoints> arm_jacobian(const ArmModel& arm, const ArmAngles& q, double torso_lift) {
  const auto frames = arm_link_frames(arm, q, torso_lift);
  const Eigen::Vector3d tip = frames.back().translation();
  Eigen::Matrix<double, 6, kArmJoints> J;
  for (int i = 0; i < kArmJoints; ++i) {
    const Eigen::Vector3d z = frames[i].linear() * arm.joints[i].axis;
    J.block<3, 1>(0, i) = z.cross(tip - frames[i].translation());
    J.block<3, 1>(3, i) = z;
  }
  return J;
}

Pose forward_kinematics(const ArmModel& arm, const JointVector& q, Side side) {
  check_arm(arm, q, side);
  return Pose::from_isometry(arm_link_frames(arm, q.arm(side), q.torso_lift).back());
}

Eigen::Vector3d fingertip_point(const ArmModel& arm, const JointVector& q, Side side) {
  const Pose g = forward_kinematics(arm, q, side);
  return g * Eigen::Vector3d(arm.fingertip_offset, 0.0, 0.0);
}

IkResult solve_ik_step(const ArmModel& arm, const JointVector& q_current, Side side, const Pose& goal,
                       const IkOptions& options) {
  check_arm(arm, q_current, side);
  IkResult result;
  result.q = q_current;

  const double lift = q_current.torso_lift;
  const TaskError start = task_error(arm_link_frames(arm, q_current.arm(side), lift).back(), goal);
  result.position_error = start.position;
  result.orientation_error = start.orientation;
  if (start.position <= options.position_tolerance && start.orientation <= options.orientation_tolerance) {
    result.status = IkStatus::converged;
    return result;
  }

  // Goals beyond the chain length can never converge.
  const Eigen::Vector3d shoulder = (lift_frame(lift) * arm.mount).translation();
  const Eigen::Vector3d goal_tip = goal * Eigen::Vector3d(arm.fingertip_offset, 0.0, 0.0);
  if ((goal_tip - shoulder).norm() > arm.reach() + options.position_tolerance) return result;

  std::mt19937_64 rng(0x5eedULL);
  Attempt best{q_current.arm(side), start, 0};
  int total_iterations = 0;
  for (int attempt = 0; attempt <= options.restarts; ++attempt) {
    ArmAngles seed = attempt == 0 ? q_current.arm(side) : attempt == 1 ? arm.nominal : random_seed(arm, rng);
    Attempt a = dls_attempt(arm, seed, lift, goal, options);
    total_iterations += a.iterations;
    if (cost(a.err) < cost(best.err)) best = a;
    if (best.err.position <= options.position_tolerance && best.err.orientation <= options.orientation_tolerance)
      break;
  }

  result.iterations = total_iterations;
  result.position_error = best.err.position;
  result.orientation_error = best.err.orientation;
  if (best.err.position <= options.position_tolerance && best.err.orientation <= options.orientation_tolerance) {
    result.status = IkStatus::converged;
    result.q.arm(side) = best.q;
  }
  return result;
}

Eigen::Isometry3d camera_in_base(const HeadModel& head, const CameraModel& camera, const JointVector& q) {
  Eigen::Isometry3d T = lift_frame(q.torso_lift);
  T.translate(head.pan_origin);
  T.rotate(Eigen::AngleAxisd(q.head_pan, Eigen::Vector3d::UnitZ()));
  T.translate(head.tilt_origin);
  T.rotate(Eigen::AngleAxisd(q.head_tilt, Eigen::Vector3d::UnitY()));
  return T * camera.mount;
}

Pose camera_pose(const RobotDescription& desc, const BasePose& base, const JointVector& q) {
  return Pose::from_isometry(base.isometry() * camera_in_base(desc.head, desc.camera, q));
}

PanTilt head_look_at(const HeadModel& head, const CameraModel& camera, const JointVector& q,
                     const Eigen::Vector3d& target) {
  JointVector probe = q;
  const Eigen::Vector3d pivot = lift_frame(q.torso_lift) * head.pan_origin;
  const Eigen::Vector3d d = target - pivot;
  probe.head_pan = std::atan2(d.y(), d.x());
  probe.head_tilt = std::atan2(-d.z(), std::hypot(d.x(), d.y()));

  for (int k = 0; k < 100; ++k) {
    const Eigen::Vector3d p = camera_in_base(head, camera, probe).inverse() * target;
    if (p.norm() < 1e-9) throw KinematicsError(KinematicsError::Code::degenerate_target, "target at camera origin");
    const double yaw = std::atan2(p.y(), p.x());
    const double pitch = std::atan2(-p.z(), std::hypot(p.x(), p.y()));
    if (std::abs(yaw) < 1e-14 && std::abs(pitch) < 1e-14) break;
    probe.head_pan += yaw;
    probe.head_tilt += pitch;
  }

  PanTilt out;
  const double pan = normalize_angle(probe.head_pan);
  out.pan = std::clamp(pan, head.pan_lower, head.pan_upper);
  out.tilt = std::clamp(probe.head_tilt, head.tilt_lower, head.tilt_upper);
  out.clamped = out.pan != pan || out.tilt != probe.head_tilt;
  return out;
}

std::string_view to_string(ScreenEdge e) {
  switch (e) {
    case ScreenEdge::left: return "left";
    case ScreenEdge::right: return "right";
    case ScreenEdge::top: return "top";
    case ScreenEdge::bottom: return "bottom";
    case ScreenEdge::top_left: return "top_left";
    case ScreenEdge::top_right: return "top_right";
    case ScreenEdge::bottom_left: return "bottom_left";
    case ScreenEdge::bottom_right: return "bottom_right";
  }
  return "left";
}

Projection project_to_pixel(const CameraModel& camera, const Pose& camera_pose, const Eigen::Vector3d& point) {
  const Eigen::Vector3d p = camera_pose.inverse() * point;
  // Optical frame: X right, Y down, Z forward.
  const double X = -p.y(), Y = -p.z(), Z = p.x();
  Projection out;
  if (Z > 1e-9) {
    const double u = camera.fx * X / Z + camera.cx;
    const double v = camera.fy * Y / Z + camera.cy;
    out.pixel = {u, v};
    if (camera.contains(out.pixel)) {
      out.on_screen = true;
      return out;
    }
    const bool left = u < 0.0, right = u > camera.width, top = v < 0.0, bottom = v > camera.height;
    if (top && left) out.edge = ScreenEdge::top_left;
    else if (top && right) out.edge = ScreenEdge::top_right;
    else if (bottom && left) out.edge = ScreenEdge::bottom_left;
    else if (bottom && right) out.edge = ScreenEdge::bottom_right;
    else if (left) out.edge = ScreenEdge::left;
    else if (right) out.edge = ScreenEdge::right;
    else if (top) out.edge = ScreenEdge::top;
    else out.edge = ScreenEdge::bottom;
    return out;
  }
  // Behind the image plane: pick the sector of the lateral direction, scaled so
  // the image diagonals separate edges from corners.
  if (std::abs(X) < 1e-12 && std::abs(Y) < 1e-12) {
    out.edge = ScreenEdge::bottom;
    return out;
  }
  const double a = std::atan2(Y * camera.fy / camera.height, X * camera.fx / camera.width);
  const int sector = static_cast<int>(std::lround(a / (std::numbers::pi / 4.0)));  // -4..4
  switch (sector) {
    case 0: out.edge = ScreenEdge::right; break;
    case 1: out.edge = ScreenEdge::bottom_right; break;
    case 2: out.edge = ScreenEdge::bottom; break;
    case 3: out.edge = ScreenEdge::bottom_left; break;
    case -1: out.edge = ScreenEdge::top_right; break;
    case -2: out.edge = ScreenEdge::top; break;
    case -3: out.edge = ScreenEdge::top_left; break;
    default: out.edge = ScreenEdge::left; break;
  }
  return out;
}

Ray pixel_ray(const CameraModel& camera, const Pose& camera_pose, const Eigen::Vector2d& pixel) {
  if (!camera.contains(pixel))
    throw KinematicsError(KinematicsError::Code::pixel_out_of_image, "pixel outside the image");
  const Eigen::Vector3d local(1.0, -(pixel.x() - camera.cx) / camera.fx, -(pixel.y() - camera.cy) / camera.fy);
  return {camera_pose.position, (camera_pose.orientation * local).normalized()};
}

std::optional<Eigen::Vector3d> pixel_to_ground(const CameraModel& camera, const Pose& camera_pose,
                                               const Eigen::Vector2d& pixel) {
  const Ray ray = pixel_ray(camera, camera_pose, pixel);
  if (ray.direction.z() > -1e-12) return std::nullopt;
  const double t = -ray.origin.z() / ray.direction.z();
  if (t < 0.0) return std::nullopt;
  Eigen::Vector3d hit = ray.at(t);
  hit.z() = 0.0;
  return hit;
}

}  // namespace surrogate
