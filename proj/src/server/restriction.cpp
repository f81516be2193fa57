#include "surrogate/server/restriction.hpp"

#include <array>

namespace surrogate {

namespace {
constexpr std::array<std::string_view, kDofs> kNames{
    "base_x",     "base_y",      "base_yaw",     "torso",       "head_pan",     "head_tilt",   "left_x",
    "left_y",     "left_z",      "left_roll",    "left_pitch",  "left_yaw",     "right_x",     "right_y",
    "right_z",    "right_roll",  "right_pitch",  "right_yaw",   "left_gripper", "right_gripper"};

Dof hand(Side s, int axis) {  // axis 0..5: x y z roll pitch yaw
  return static_cast<Dof>((s == Side::left ? bit(Dof::left_x) : bit(Dof::right_x)) + axis);
}
}  // namespace

std::string_view to_string(Dof d) { return kNames[bit(d)]; }

DofMask required_dofs(const Command& c) {
  DofMask m;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LookCmd>) {
          m.set(bit(Dof::head_pan)).set(bit(Dof::head_tilt));
        } else if constexpr (std::is_same_v<T, DriveCmd>) {
          m.set(bit(Dof::base_x)).set(bit(Dof::base_y));
        } else if constexpr (std::is_same_v<T, TurnCmd>) {
          m.set(bit(Dof::base_yaw));
        } else if constexpr (std::is_same_v<T, SpineCmd>) {
          m.set(bit(Dof::torso));
        } else if constexpr (std::is_same_v<T, HandStepCmd>) {
          m.set(bit(hand(x.side, 0))).set(bit(hand(x.side, 1)));
        } else if constexpr (std::is_same_v<T, HandVerticalCmd>) {
          m.set(bit(hand(x.side, 2)));
        } else if constexpr (std::is_same_v<T, HandRotateCmd>) {
          m.set(bit(hand(x.side, 3 + static_cast<int>(x.arrow) / 2)));
        } else if constexpr (std::is_same_v<T, GripperCmd>) {
          m.set(bit(x.side == Side::left ? Dof::left_gripper : Dof::right_gripper));
        }
        // step-size selection and mode switches move nothing
      },
      c);
  return m;
}

DofMask Restriction::enabled() const {
  DofMask m;
  if (kind == Kind::full) return m.set();
  m.set(bit(Dof::head_pan)).set(bit(Dof::head_tilt));
  m.set(bit(side == Side::left ? Dof::left_gripper : Dof::right_gripper));
  for (int a = 0; a < 6; ++a) m.set(bit(hand(side, a)));
  return m;
}

std::string Restriction::describe() const {
  return kind == Kind::full ? "full" : "arat(" + std::string(to_string(side)) + ")";
}

std::optional<Restriction> parse_restriction(std::string_view text) {
  if (text == "full") return Restriction::full();
  for (Side s : {Side::left, Side::right}) {
    const std::string name(to_string(s));
    if (text == "arat(" + name + ")" || text == "arat:" + name || text == "arat-" + name) return Restriction::arat(s);
  }
  return std::nullopt;
}

}  // namespace surrogate
