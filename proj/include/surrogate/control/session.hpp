#pragma once

#include <memory>

#include "surrogate/control/command_json.hpp"
#include "surrogate/control/controller.hpp"

namespace surrogate {

inline constexpr Micros kDefaultTick{20'000};  // 50 Hz

/// The deterministic core of a robot session: world, controllers and the
/// full scene. Given the same commands at the same ticks, two sessions end in
/// identical states.
class Session {
 public:
  Session(std::shared_ptr<const RobotDescription> robot, Scene scene, WorldOptions options = {},
          ControllerConfig config = {}, Micros tick = kDefaultTick);

  World& world() { return world_; }
  const World& world() const { return world_; }
  Controller& controller() { return controller_; }
  const Controller& controller() const { return controller_; }
  const Scene& full_scene() const { return *full_scene_; }
  Micros tick_length() const { return tick_; }
  Micros now() const { return world_.now(); }

  CommandResult issue(const Command& c) { return controller_.issue(world_, c); }
  /// Restriction changes are the server's business and do nothing here.
  void admin(const AdminCommand& c);

  /// One control update and one world step; returns contact edges.
  std::vector<ContactEvent> tick();

 private:
  std::shared_ptr<const Scene> full_scene_;
  World world_;
  Controller controller_;
  Micros tick_;
};

}  // namespace surrogate
