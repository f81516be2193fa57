#pragma once

#include <optional>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "surrogate/kinematics/types.hpp"

namespace surrogate {

enum class StepSize { XS, S, M, L };

std::string_view to_string(StepSize s);
std::optional<StepSize> parse_step_size(std::string_view s);
double translation_step(StepSize s);  // m
double rotation_step(StepSize s);     // rad

enum class Mode { looking, driving, spine, hand_left, hand_right };
std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);
std::optional<Side> hand_side(Mode m);

/// Rotation arrows name a signed axis of the gripper frame
/// (x along the fingers, y across the fingers, z completing the frame).
enum class RotateArrow { roll_pos, roll_neg, pitch_pos, pitch_neg, yaw_pos, yaw_neg };
std::string_view to_string(RotateArrow a);
std::optional<RotateArrow> parse_arrow(std::string_view s);
RotateArrow opposite(RotateArrow a);
/// Unit axis in the gripper frame, signed.
Eigen::Vector3d arrow_axis(RotateArrow a);

enum class TurnDirection { left, right };  // left is +yaw

struct LookCmd {
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
};
struct DriveCmd {
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
  bool held = true;
};
struct TurnCmd {
  TurnDirection direction = TurnDirection::left;
  bool held = true;
};
struct SpineCmd {
  double fraction = 0.0;
};
struct HandStepCmd {
  Side side = Side::right;
  Eigen::Vector3d disk_point = Eigen::Vector3d::Zero();  // world
  std::optional<StepSize> step;  // unset: the arm's persisted size
};
struct HandVerticalCmd {
  Side side = Side::right;
  bool up = true;
  std::optional<StepSize> step;
};
struct HandRotateCmd {
  Side side = Side::right;
  RotateArrow arrow = RotateArrow::roll_pos;
  std::optional<StepSize> step;
};
struct GripperCmd {
  Side side = Side::right;
  std::optional<double> open_fraction;  // unset: grasp
};
struct StepSizeCmd {
  Side side = Side::right;
  StepSize step = StepSize::S;
};
struct ModeCmd {
  Mode mode = Mode::looking;
};

using HandCommand = std::variant<HandStepCmd, HandVerticalCmd, HandRotateCmd>;
using Command = std::variant<LookCmd, DriveCmd, TurnCmd, SpineCmd, HandStepCmd, HandVerticalCmd, HandRotateCmd,
                             GripperCmd, StepSizeCmd, ModeCmd>;

Side side_of(const HandCommand& c);
std::optional<HandCommand> as_hand_command(const Command& c);

}  // namespace surrogate
