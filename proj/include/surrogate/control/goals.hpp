#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "surrogate/sim/world.hpp"

namespace surrogate {

enum class Subsystem { arm_left, arm_right, head, base, torso, gripper_left, gripper_right };
inline constexpr std::size_t kSubsystems = 7;

std::string_view to_string(Subsystem s);
std::optional<Subsystem> parse_subsystem(std::string_view s);
constexpr Subsystem arm_subsystem(Side s) { return s == Side::left ? Subsystem::arm_left : Subsystem::arm_right; }
constexpr Subsystem gripper_subsystem(Side s) { return s == Side::left ? Subsystem::gripper_left : Subsystem::gripper_right; }

enum class GoalState { active, reached, aborted, preempted };
std::string_view to_string(GoalState s);

struct ArmGoal {
  Pose gripper;              // world frame, as planned
  Pose gripper_in_base;      // what the arm actually tracks
  Eigen::Vector3d fingertip; // world frame
};
struct HeadGoal {
  double pan = 0.0;
  double tilt = 0.0;
  Eigen::Vector3d target = Eigen::Vector3d::Zero();  // world
};
struct BaseGoal {
  enum class Kind { drive, turn } kind = Kind::drive;
  Eigen::Vector3d ground = Eigen::Vector3d::Zero();  // drive target, world
  double yaw_rate = 0.0;                              // turn
};
struct TorsoGoal {
  double lift = 0.0;
};
struct GripperGoal {
  bool grasp = false;
  double aperture = 0.0;
  std::optional<GraspOutcome> outcome;
  std::string object;
};

using GoalPayload = std::variant<ArmGoal, HeadGoal, BaseGoal, TorsoGoal, GripperGoal>;

struct ControlGoal {
  std::uint64_t id = 0;
  Subsystem subsystem = Subsystem::head;
  GoalPayload payload;
  GoalState state = GoalState::active;
  Micros issued{0};
  Micros finished{0};
  std::string reason;  // why it was aborted, when it was

  bool terminal() const { return state != GoalState::active; }
};

struct GoalTransition {
  std::uint64_t goal = 0;
  Subsystem subsystem = Subsystem::head;
  GoalState state = GoalState::active;  // the new state; active means issued
  Micros t{0};
  std::string reason;
};

/// Goals by id plus, per subsystem, the active and the latest one. Issuing a
/// goal preempts the subsystem's active one; terminal states never change
/// again. Old terminal goals are forgotten beyond `kHistory`.
class GoalTable {
 public:
  /// Returns the new goal's id. An already-aborted goal (e.g. unreachable)
  /// does not preempt the active one.
  std::uint64_t issue(Subsystem s, GoalPayload payload, Micros now, std::optional<std::string> aborted = std::nullopt);
  /// Moves the active goal of `s` to a terminal state; no-op if none is active.
  void finish(Subsystem s, GoalState state, Micros now, std::string reason = {});

  const ControlGoal* active(Subsystem s) const;
  ControlGoal* active(Subsystem s);
  /// The most recent goal for the subsystem, terminal or not.
  const ControlGoal* latest(Subsystem s) const;
  const ControlGoal* find(std::uint64_t id) const;

  std::vector<GoalTransition> drain_transitions();
  const std::vector<GoalTransition>& pending_transitions() const { return transitions_; }

 private:
  static constexpr std::size_t kHistory = 1024;

  std::map<std::uint64_t, ControlGoal> goals_;
  std::array<std::uint64_t, kSubsystems> active_{};  // 0: none
  std::array<std::uint64_t, kSubsystems> latest_{};
  std::vector<GoalTransition> transitions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace surrogate
