#pragma once

#include <functional>
#include <random>

#include "surrogate/server/scripted_client.hpp"

namespace surrogate {

class AgentFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AgentOptions {
  LinkOptions link;
  std::string token = "surrogate";
  double click_noise_px = 0.0;  // sd of the pixel error on look/drive clicks
  double think_time = 0.0;      // s of idling before each arm, gripper or spine command
  std::uint64_t seed = 7;
};

/// An operator at the browser: it perceives the world directly (ground truth)
/// but moves the robot only by sending protocol commands through its own
/// client connection, one step at a time, waiting for each to settle.
///
/// Every wait advances the simulation by stepping the server core, so an
/// agent run is single-threaded and deterministic.
class Agent {
 public:
  struct Outcome {
    bool accepted = false;
    std::string reason;       // rejection reason or ack notice
    std::string state;        // terminal goal state, empty without a goal
    nlohmann::json goal;      // last goal message
    bool reached() const { return accepted && (state.empty() || state == "reached"); }
  };

  explicit Agent(TeleopCore& core, AgentOptions options = {});

  const World& world() const { return core_.session().world(); }
  const RobotDescription& robot() const { return world().robot(); }
  ScriptedClient& client() { return client_; }
  TeleopCore& core() { return core_; }
  Micros now() const { return core_.session().now(); }
  double tick_seconds() const;

  /// The run fails with AgentFailure("timeout") once the clock passes this.
  void set_deadline(std::optional<Micros> t) { deadline_ = t; }
  /// Called after every simulation step.
  void set_observer(std::function<void()> f) { observer_ = std::move(f); }

  void tick();
  void idle(double seconds);
  /// Steps until `pred` holds; false after `timeout` seconds.
  bool wait(const std::function<bool()>& pred, double timeout);

  /// Sends one command and waits for its reply and, if a goal was created, its end.
  Outcome act(const Command& c, double timeout = 60.0);

  void set_mode(Mode m);
  /// Head toward a world point, clicking at its pixel or toward the screen edge
  /// it lies beyond until it is in view.
  void look_at(const Eigen::Vector3d& p);
  /// Held drive toward a visible ground point on the line through `xy`,
  /// released when the base center is as close to `xy` as the tick allows.
  void drive_to(const Eigen::Vector2d& xy);
  /// Held turn, released nearest to `heading`.
  void turn_to(double heading);
  void spine(double fraction);

  /// Fingertip to `tip` with horizontal steps (clamped at the clicked point)
  /// and vertical steps combined on the 5 mm grid they span, stopping within
  /// `tolerance` of the height. Returns false when no step size gets through.
  bool hand_to(Side s, const Eigen::Vector3d& tip, bool vertical_first = false, double tolerance = 0.004);
  bool hand_horizontal(Side s, const Eigen::Vector2d& xy);
  bool hand_vertical(Side s, double z, double tolerance = 0.004);
  bool rotate(Side s, RotateArrow arrow, StepSize step);
  /// Whether the server's preview of `c` finds a path.
  bool preview(const HandCommand& c);
  /// Small gripper rotations, kept only when they make `blocked` feasible;
  /// how an operator frees a wrist pinned at a joint limit.
  bool unstick(Side s, const HandCommand& blocked);
  void open_gripper(Side s, double fraction = 1.0);
  /// Grasp outcome as reported in the goal message ("grasped", "no_object", "too_wide").
  std::string grasp(Side s);

 private:
  Eigen::Vector2d noisy(const Eigen::Vector2d& pixel);
  std::optional<Eigen::Vector2d> pixel_of(const Eigen::Vector3d& p, double margin = 20.0) const;
  void think();

  TeleopCore& core_;
  AgentOptions options_;
  LoopbackLink link_;
  ScriptedClient client_;
  std::optional<Micros> deadline_;
  std::function<void()> observer_;
  std::mt19937_64 rng_;
  Mode mode_ = Mode::looking;
  bool mode_known_ = false;
};

/// Fewest vertical steps (size, up) from `sizes` whose sum lands within
/// `tolerance` of `dz` (rounded to the 5 mm grid); empty when already within
/// tolerance or when no combination does.
std::vector<std::pair<StepSize, bool>> vertical_steps(double dz, const std::vector<StepSize>& sizes,
                                                      double tolerance = 0.004);

}  // namespace surrogate
