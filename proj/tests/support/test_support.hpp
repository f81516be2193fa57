#pragma once

#include <filesystem>
#include <fstream>
#include <memory>

#include <json.hpp>

#include "surrogate/kinematics/robot_description.hpp"

namespace surrogate::test {

inline std::filesystem::path config_dir() { return SURROGATE_CONFIG_DIR; }

inline const RobotDescription& robot() {
  static const RobotDescription desc = load_robot_description(config_dir() / "robot.json");
  return desc;
}

inline std::shared_ptr<const RobotDescription> robot_ptr() {
  static const auto ptr = std::make_shared<const RobotDescription>(robot());
  return ptr;
}

inline nlohmann::json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace surrogate::test
