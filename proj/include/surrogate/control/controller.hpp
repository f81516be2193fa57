#pragma once

#include <array>
#include <optional>
#include <string>

#include "surrogate/control/commands.hpp"
#include "surrogate/control/goals.hpp"
#include "surrogate/kinematics/kinematics.hpp"
#include "surrogate/sim/world.hpp"

namespace surrogate {

struct ControllerConfig {
  double max_linear_velocity = 0.3;   // m/s, driving
  double max_angular_velocity = 0.5;  // rad/s, turning
  double drive_gain = 0.5;            // 1/s
  double drive_stop_distance = 0.01;
  double arm_speed = 0.08;            // m/s, fingertip
  double arm_angular_speed = 0.5;     // rad/s, gripper orientation
  double path_resolution = 0.005;     // m between hand path samples
  double path_angle_resolution = 0.035;  // rad between hand path samples
  Micros deadman{300'000};
  Micros tracking_period{500'000};
  double floor_margin = 0.02;         // lowest fingertip height a hand goal may target
  double look_fallback_distance = 3.0;
};

struct CommandResult {
  bool accepted = false;
  std::string error;                 // rejection reason when !accepted
  std::optional<std::uint64_t> goal; // goal created or updated
  std::string notice;                // non-fatal condition worth showing the operator
};

/// Goal a hand command would produce from the current state.
///
/// Hand goals are reachable only along a continuous path: the fingertip on a
/// straight line while the orientation slerps, solved from the current joints
/// at dense samples. A goal whose only solutions lie on another IK branch is
/// unreachable rather than approached by a large joint-space swing.
struct HandPlan {
  bool ok = false;
  std::string error;  // zero_length_step, below_floor, unreachable
  Pose gripper;       // world
  Pose gripper_in_base;
  Eigen::Vector3d fingertip = Eigen::Vector3d::Zero();  // world
  JointVector q;      // final IK solution, valid when ok
  std::vector<ArmAngles> path;  // joint waypoints from the current configuration to q
};

/// Turns operator commands into per-subsystem goals and drives them to
/// completion one tick at a time. Call update() once per tick before World::step().
class Controller {
 public:
  explicit Controller(ControllerConfig config = {});

  const ControllerConfig& config() const { return config_; }

  CommandResult issue(World& world, const Command& command);

  /// Pure: the goal `command` would produce, without touching any state.
  HandPlan preview(const World& world, const HandCommand& command) const;

  void update(World& world, Micros dt);

  /// Aborts every active goal and stops all motion (run-stop, operator loss).
  void abort_all(World& world, const std::string& reason);

  const GoalTable& goals() const { return goals_; }
  std::vector<GoalTransition> drain_transitions() { return goals_.drain_transitions(); }
  GoalState goal_status(Subsystem s) const;

  StepSize step_size(Side s) const { return step_[index(s)]; }
  Mode mode() const { return mode_; }
  std::optional<Side> tracking() const { return hand_side(mode_); }

 private:
  struct ArmExec {
    std::uint64_t goal = 0;
    Pose target;  // base frame
    std::vector<ArmAngles> path;
    Micros t0{0};
    double duration = 0.0;
  };
  struct GripperExec {
    std::uint64_t goal = 0;
    bool grasp = false;
  };

  CommandResult look(World& w, const LookCmd& c);
  CommandResult drive(World& w, const DriveCmd& c);
  CommandResult turn(World& w, const TurnCmd& c);
  CommandResult spine(World& w, const SpineCmd& c);
  CommandResult hand(World& w, const HandCommand& c);
  CommandResult gripper(World& w, const GripperCmd& c);
  CommandResult set_mode(World& w, Mode m);

  void update_arm(World& w, Side s, Micros dt);
  void update_base(World& w);
  void track_head(World& w);

  ControllerConfig config_;
  GoalTable goals_;
  std::array<StepSize, 2> step_{StepSize::S, StepSize::S};
  Mode mode_ = Mode::looking;
  std::array<std::optional<ArmExec>, 2> arm_;
  std::array<std::optional<GripperExec>, 2> gripper_;
  Micros last_base_message_{0};
  std::optional<Micros> next_track_;
  bool track_now_ = false;
};

}  // namespace surrogate
