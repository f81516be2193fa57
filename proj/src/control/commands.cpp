#include "surrogate/control/commands.hpp"

#include <array>
#include <numbers>

namespace surrogate {

namespace {
constexpr std::array<std::string_view, 4> kStepNames{"XS", "S", "M", "L"};
constexpr std::array<double, 4> kTranslation{0.015, 0.04, 0.11, 0.25};
constexpr std::array<double, 4> kRotation{std::numbers::pi / 18, std::numbers::pi / 10, std::numbers::pi / 5,
                                          std::numbers::pi / 3};
constexpr std::array<std::string_view, 5> kModeNames{"looking", "driving", "spine", "hand_left", "hand_right"};
constexpr std::array<std::string_view, 6> kArrowNames{"roll_pos", "roll_neg", "pitch_pos",
                                                      "pitch_neg", "yaw_pos", "yaw_neg"};
}  // namespace

std::string_view to_string(StepSize s) { return kStepNames[static_cast<int>(s)]; }

std::optional<StepSize> parse_step_size(std::string_view s) {
  for (int i = 0; i < 4; ++i)
    if (kStepNames[i] == s) return static_cast<StepSize>(i);
  return std::nullopt;
}

double translation_step(StepSize s) { return kTranslation[static_cast<int>(s)]; }
double rotation_step(StepSize s) { return kRotation[static_cast<int>(s)]; }

std::string_view to_string(Mode m) { return kModeNames[static_cast<int>(m)]; }

std::optional<Mode> parse_mode(std::string_view s) {
  for (int i = 0; i < 5; ++i)
    if (kModeNames[i] == s) return static_cast<Mode>(i);
  return std::nullopt;
}

std::optional<Side> hand_side(Mode m) {
  if (m == Mode::hand_left) return Side::left;
  if (m == Mode::hand_right) return Side::right;
  return std::nullopt;
}

std::string_view to_string(RotateArrow a) { return kArrowNames[static_cast<int>(a)]; }

std::optional<RotateArrow> parse_arrow(std::string_view s) {
  for (int i = 0; i < 6; ++i)
    if (kArrowNames[i] == s) return static_cast<RotateArrow>(i);
  return std::nullopt;
}

RotateArrow opposite(RotateArrow a) { return static_cast<RotateArrow>(static_cast<int>(a) ^ 1); }

Eigen::Vector3d arrow_axis(RotateArrow a) {
  const int i = static_cast<int>(a);
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  v[i / 2] = (i % 2 == 0) ? 1.0 : -1.0;
  return v;
}

Side side_of(const HandCommand& c) {
  return std::visit([](const auto& h) { return h.side; }, c);
}

std::optional<HandCommand> as_hand_command(const Command& c) {
  if (auto* s = std::get_if<HandStepCmd>(&c)) return *s;
  if (auto* v = std::get_if<HandVerticalCmd>(&c)) return *v;
  if (auto* r = std::get_if<HandRotateCmd>(&c)) return *r;
  return std::nullopt;
}

}  // namespace surrogate
