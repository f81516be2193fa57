#pragma once

#include <bitset>
#include <optional>
#include <string>

#include "surrogate/control/commands.hpp"

namespace surrogate {

/// The operator-controllable degrees of freedom.
enum class Dof {
  base_x, base_y, base_yaw, torso, head_pan, head_tilt,
  left_x, left_y, left_z, left_roll, left_pitch, left_yaw,
  right_x, right_y, right_z, right_roll, right_pitch, right_yaw,
  left_gripper, right_gripper,
};
inline constexpr std::size_t kDofs = 20;
using DofMask = std::bitset<kDofs>;

std::string_view to_string(Dof d);
constexpr std::size_t bit(Dof d) { return static_cast<std::size_t>(d); }

/// Which degrees of freedom a command drives.
DofMask required_dofs(const Command& c);

/// Full control, or the assessment mode: head, one gripper and that hand's
/// six-DoF goals.
struct Restriction {
  enum class Kind { full, arat } kind = Kind::full;
  Side side = Side::right;

  static Restriction full() { return {}; }
  static Restriction arat(Side s) { return {Kind::arat, s}; }

  DofMask enabled() const;
  bool allows(const Command& c) const { return (required_dofs(c) & ~enabled()).none(); }
  std::string describe() const;  // "full", "arat(right)"
};

/// Accepts "full", "arat(left)", "arat:right" and the like.
std::optional<Restriction> parse_restriction(std::string_view text);

}  // namespace surrogate
