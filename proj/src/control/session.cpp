#include "surrogate/control/session.hpp"

namespace surrogate {

Session::Session(std::shared_ptr<const RobotDescription> robot, Scene scene, WorldOptions options,
                 ControllerConfig config, Micros tick)
    : full_scene_(std::make_shared<const Scene>(scene)),
      world_(std::move(robot), std::move(scene), options),
      controller_(config),
      tick_(tick) {}

void Session::admin(const AdminCommand& c) {
  if (const auto* r = std::get_if<RunStopCmd>(&c)) {
    world_.set_run_stop(r->engaged);
    if (r->engaged) controller_.abort_all(world_, "run_stop");
  } else if (const auto* l = std::get_if<LoadItemCmd>(&c)) {
    controller_.abort_all(world_, "scene_reset");
    world_.load_scene(select_item(*full_scene_, l->item, l->side));
  } else if (std::holds_alternative<ResetSceneCmd>(c)) {
    controller_.abort_all(world_, "scene_reset");
    world_.load_scene(*full_scene_);
  }
}

std::vector<ContactEvent> Session::tick() {
  controller_.update(world_, tick_);
  world_.step(tick_);
  return world_.detect_contacts();
}

}  // namespace surrogate
