#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "surrogate/sim/scene.hpp"

namespace surrogate {

using Micros = std::chrono::microseconds;

enum class ContactPhase { onset, ongoing, released };
std::string_view to_string(ContactPhase p);

struct ContactEvent {
  std::string patch;
  PatchKind kind = PatchKind::arm;
  std::string object;
  Eigen::Vector3d local = Eigen::Vector3d::Zero();  // host link frame
  Eigen::Vector3d world = Eigen::Vector3d::Zero();
  Micros t{0};
  ContactPhase phase = ContactPhase::onset;
};

struct Diagnostics {
  double battery = 1.0;
  bool run_stop = false;
  bool calibration_ok = true;
  bool charging = false;
  Micros clock{0};
};

enum class GraspOutcome { grasped, no_object, too_wide };
std::string_view to_string(GraspOutcome g);

struct GraspResult {
  GraspOutcome outcome = GraspOutcome::no_object;
  std::string object;
  double aperture = 0.0;  // where the fingers come to rest
};

struct Attachment {
  std::string object;
  Eigen::Isometry3d grasp = Eigen::Isometry3d::Identity();  // gripper frame -> object frame
};

struct ColoredPoint {
  Eigen::Vector3d position;
  Color color;
};

struct WorldHit {
  double t = 0.0;
  Eigen::Vector3d point;
  Eigen::Vector3d normal;
  std::string object;  // empty for the floor
};

struct WorldOptions {
  double battery_hours = 8.0;
  bool stop_on_contact = false;
};

inline constexpr Color kFloorColor{150, 140, 125};

/// Quasi-static simulated world: the robot, scene objects and diagnostics.
///
/// A plain value type; copying it yields an independent snapshot. Motion is
/// commanded by per-subsystem targets (arms, torso, head, grippers) that are
/// approached at the configured velocity caps, plus a base velocity.
class World {
 public:
  World(std::shared_ptr<const RobotDescription> robot, Scene scene, WorldOptions options = {});

  const RobotDescription& robot() const { return *robot_; }
  const std::shared_ptr<const RobotDescription>& robot_ptr() const { return robot_; }
  const Scene& scene() const { return *scene_; }
  const WorldOptions& options() const { return options_; }

  const JointVector& joints() const { return q_; }
  const BasePose& base() const { return base_; }
  const Eigen::Vector3d& base_velocity() const { return base_velocity_; }  // vx, vy (base frame), yaw rate
  const std::vector<WorldObject>& objects() const { return objects_; }
  const WorldObject* object(const std::string& id) const;
  std::optional<Eigen::Vector3d> anchor(const std::string& name) const;
  const Diagnostics& diagnostics() const { return diag_; }
  Micros now() const { return diag_.clock; }
  const std::optional<Attachment>& held(Side s) const { return held_[index(s)]; }

  // Actuation. Setters return false (and do nothing) while the run-stop is engaged.
  bool set_arm_target(Side s, const ArmAngles& q);
  bool set_torso_target(double lift);
  bool set_head_target(double pan, double tilt);
  bool set_gripper_target(Side s, double aperture);
  bool set_base_velocity(const Eigen::Vector3d& v);
  void stop_arm(Side s) { arm_target_[index(s)].reset(); }
  void stop_torso() { torso_target_.reset(); }
  void stop_head() { head_target_.reset(); }
  void stop_gripper(Side s) { aperture_target_[index(s)].reset(); }
  void stop_base() { base_velocity_.setZero(); }
  bool arm_moving(Side s) const { return arm_target_[index(s)].has_value(); }
  bool torso_moving() const { return torso_target_.has_value(); }
  bool head_moving() const { return head_target_.has_value(); }
  bool gripper_moving(Side s) const { return aperture_target_[index(s)].has_value(); }
  bool base_moving() const { return !base_velocity_.isZero(0.0); }

  void step(Micros dt);

  /// Teleports the robot (harness resets); clears targets.
  void reset_robot(const RobotStart& start);
  /// Swaps in a new scene and its robot start; the clock and battery carry on.
  void load_scene(Scene scene);

  Pose gripper_pose(Side s) const;       // world
  Eigen::Vector3d fingertip(Side s) const;  // world
  Pose camera() const;
  Pose depth_camera() const;
  /// World-frame transform of a skin patch host link.
  Eigen::Isometry3d host_frame(SkinHost host) const;

  /// Every current patch/object overlap, phase = ongoing, no edge bookkeeping.
  std::vector<ContactEvent> overlaps() const;
  /// Overlaps plus edge events: onset for new pairs, ongoing for persisting
  /// ones, released for pairs that ended since the previous call.
  std::vector<ContactEvent> detect_contacts();

  GraspResult probe_grasp(Side s) const;
  /// Closes on the enclosed object and attaches it when the outcome is grasped.
  GraspResult attempt_grasp(Side s);
  void release(Side s);

  std::optional<WorldHit> raycast(const Ray& ray, bool include_floor = true) const;
  std::vector<ColoredPoint> sample_depth_region(const Eigen::Vector3d& center, double radius, int stride) const;

  void set_run_stop(bool engaged);
  void set_charging(bool charging) { diag_.charging = charging; }

 private:
  WorldObject* object_mut(const std::string& id);
  void update_attachments();
  bool held_by_any(const std::string& id) const;

  std::shared_ptr<const RobotDescription> robot_;
  std::shared_ptr<const Scene> scene_;
  WorldOptions options_;
  JointVector q_;
  BasePose base_;
  Eigen::Vector3d base_velocity_ = Eigen::Vector3d::Zero();
  std::vector<WorldObject> objects_;
  Diagnostics diag_;
  std::array<std::optional<ArmAngles>, 2> arm_target_;
  std::optional<double> torso_target_;
  std::optional<std::pair<double, double>> head_target_;
  std::array<std::optional<double>, 2> aperture_target_;
  std::array<std::optional<Attachment>, 2> held_;
  std::set<std::pair<std::string, std::string>> active_contacts_;
};

}  // namespace surrogate
