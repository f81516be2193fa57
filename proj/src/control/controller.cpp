#include "surrogate/control/controller.hpp"

#include <algorithm>
#include <cmath>

namespace surrogate {

namespace {

double seconds(Micros t) { return std::chrono::duration<double>(t).count(); }

double joint_delta(const Joint& j, double from, double to) {
  return j.continuous ? normalize_angle(to - from) : to - from;
}

Pose base_inverse(const World& w) { return Pose::from_isometry(w.base().isometry()).inverse(); }

// Gripper pose whose fingertip moves on a straight line while the orientation slerps.
Pose interpolate(const Pose& a, const Pose& b, const Eigen::Vector3d& tip_local, double s) {
  const Eigen::Vector3d tip = (1.0 - s) * (a * tip_local) + s * (b * tip_local);
  const Eigen::Quaterniond r = a.orientation.slerp(s, b.orientation);
  return Pose(tip - r * tip_local, r);
}

}  // namespace

Controller::Controller(ControllerConfig config) : config_(config) {}

GoalState Controller::goal_status(Subsystem s) const {
  const ControlGoal* g = goals_.latest(s);
  return g ? g->state : GoalState::reached;
}

CommandResult Controller::issue(World& w, const Command& command) {
  return std::visit(
      [&](const auto& c) -> CommandResult {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, LookCmd>) return look(w, c);
        else if constexpr (std::is_same_v<T, DriveCmd>) return drive(w, c);
        else if constexpr (std::is_same_v<T, TurnCmd>) return turn(w, c);
        else if constexpr (std::is_same_v<T, SpineCmd>) return spine(w, c);
        else if constexpr (std::is_same_v<T, GripperCmd>) return gripper(w, c);
        else if constexpr (std::is_same_v<T, StepSizeCmd>) {
          step_[index(c.side)] = c.step;
          return {true, {}, std::nullopt, {}};
        } else if constexpr (std::is_same_v<T, ModeCmd>) return set_mode(w, c.mode);
        else return hand(w, HandCommand(c));
      },
      command);
}

CommandResult Controller::set_mode(World& w, Mode m) {
  (void)w;
  mode_ = m;
  if (hand_side(m)) track_now_ = true;
  return {true, {}, std::nullopt, {}};
}

CommandResult Controller::look(World& w, const LookCmd& c) {
  const CameraModel& cam = w.robot().camera;
  if (!cam.contains(c.pixel)) return {false, "pixel_out_of_image", std::nullopt, {}};
  const Ray ray = pixel_ray(cam, w.camera(), c.pixel);
  const auto hit = w.raycast(ray, true);
  HeadGoal hg;
  hg.target = hit ? hit->point : ray.at(config_.look_fallback_distance);
  std::string notice = hit ? "" : "no_surface";
  try {
    const PanTilt pt = head_look_at(w.robot().head, cam, w.joints(), base_inverse(w) * hg.target);
    hg.pan = pt.pan;
    hg.tilt = pt.tilt;
  } catch (const KinematicsError&) {
    return {true, {}, goals_.issue(Subsystem::head, hg, w.now(), "degenerate_target"), {}};
  }
  const auto id = goals_.issue(Subsystem::head, hg, w.now());
  if (!w.set_head_target(hg.pan, hg.tilt)) goals_.finish(Subsystem::head, GoalState::aborted, w.now(), "run_stop");
  return {true, {}, id, notice};
}

CommandResult Controller::drive(World& w, const DriveCmd& c) {
  last_base_message_ = w.now();
  ControlGoal* active = goals_.active(Subsystem::base);
  if (!c.held) {
    w.stop_base();
    std::optional<std::uint64_t> id;
    if (active) id = active->id;
    goals_.finish(Subsystem::base, GoalState::reached, w.now());
    return {true, {}, id, {}};
  }
  const CameraModel& cam = w.robot().camera;
  if (!cam.contains(c.pixel)) return {false, "pixel_out_of_image", std::nullopt, {}};
  const auto ground = pixel_to_ground(cam, w.camera(), c.pixel);
  if (!ground) {
    w.stop_base();
    goals_.finish(Subsystem::base, GoalState::aborted, w.now(), "no_ground_point");
    return {true, {}, std::nullopt, "no_ground_point"};
  }
  if (active) {
    auto& b = std::get<BaseGoal>(active->payload);
    if (b.kind == BaseGoal::Kind::drive) {
      b.ground = *ground;
      update_base(w);
      return {true, {}, active->id, {}};
    }
  }
  BaseGoal b;
  b.kind = BaseGoal::Kind::drive;
  b.ground = *ground;
  const auto id = goals_.issue(Subsystem::base, b, w.now());
  update_base(w);
  return {true, {}, id, {}};
}

CommandResult Controller::turn(World& w, const TurnCmd& c) {
  last_base_message_ = w.now();
  ControlGoal* active = goals_.active(Subsystem::base);
  if (!c.held) {
    w.stop_base();
    std::optional<std::uint64_t> id;
    if (active) id = active->id;
    goals_.finish(Subsystem::base, GoalState::reached, w.now());
    return {true, {}, id, {}};
  }
  const double rate = (c.direction == TurnDirection::left ? 1.0 : -1.0) * config_.max_angular_velocity;
  if (active) {
    auto& b = std::get<BaseGoal>(active->payload);
    if (b.kind == BaseGoal::Kind::turn && b.yaw_rate == rate) {
      update_base(w);
      return {true, {}, active->id, {}};
    }
  }
  BaseGoal b;
  b.kind = BaseGoal::Kind::turn;
  b.yaw_rate = rate;
  const auto id = goals_.issue(Subsystem::base, b, w.now());
  update_base(w);
  return {true, {}, id, {}};
}

CommandResult Controller::spine(World& w, const SpineCmd& c) {
  if (!(c.fraction >= 0.0 && c.fraction <= 1.0)) return {false, "fraction_out_of_range", std::nullopt, {}};
  const double lift = c.fraction * w.robot().torso.travel;
  const auto id = goals_.issue(Subsystem::torso, TorsoGoal{lift}, w.now());
  if (w.joints().torso_lift == lift) {
    w.stop_torso();
    goals_.finish(Subsystem::torso, GoalState::reached, w.now());
  } else if (!w.set_torso_target(lift)) {
    goals_.finish(Subsystem::torso, GoalState::aborted, w.now(), "run_stop");
  }
  return {true, {}, id, {}};
}

HandPlan Controller::preview(const World& w, const HandCommand& command) const {
  HandPlan plan;
  const Side side = side_of(command);
  const ArmModel& arm = w.robot().arm(side);
  const Pose current = w.gripper_pose(side);
  const Eigen::Vector3d tip = w.fingertip(side);
  const Eigen::Vector3d tip_local(arm.fingertip_offset, 0.0, 0.0);
  Pose goal = current;

  if (const auto* c = std::get_if<HandStepCmd>(&command)) {
    const double step = translation_step(c->step.value_or(step_size(side)));
    Eigen::Vector3d d = c->disk_point - tip;
    d.z() = 0.0;  // the disk lies in the horizontal plane through the fingertip
    const double dist = d.norm();
    if (dist < 1e-9) {
      plan.error = "zero_length_step";
      return plan;
    }
    goal.position += std::min(step, dist) / dist * d;
  } else if (const auto* c = std::get_if<HandVerticalCmd>(&command)) {
    const double step = translation_step(c->step.value_or(step_size(side)));
    goal.position.z() += c->up ? step : -step;
  } else {
    const auto& rot = std::get<HandRotateCmd>(command);
    const double angle = rotation_step(rot.step.value_or(step_size(side)));
    const Eigen::Vector3d axis = arrow_axis(rot.arrow);
    const Eigen::Quaterniond r = current.orientation * Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis));
    goal = Pose(tip - r * tip_local, r);
  }
  plan.gripper = goal;
  plan.fingertip = goal * tip_local;
  plan.gripper_in_base = base_inverse(w) * goal;
  if (plan.fingertip.z() < config_.floor_margin) {
    plan.error = "below_floor";
    return plan;
  }

  const Pose start = base_inverse(w) * current;
  const double travel = (plan.gripper_in_base * tip_local - start * tip_local).norm();
  const double turn = angular_distance(start.orientation, plan.gripper_in_base.orientation);
  const int samples = std::max(1, static_cast<int>(std::ceil(std::max(travel / config_.path_resolution,
                                                                      turn / config_.path_angle_resolution))));
  IkOptions walk;
  walk.restarts = 0;
  JointVector q = w.joints();
  plan.path.reserve(samples + 1);
  plan.path.push_back(q.arm(side));
  for (int k = 1; k <= samples; ++k) {
    const Pose wp = k == samples ? plan.gripper_in_base
                                 : interpolate(start, plan.gripper_in_base, tip_local, double(k) / samples);
    const IkResult ik = solve_ik_step(arm, q, side, wp, walk);
    if (!ik.ok()) {
      plan.path.clear();
      plan.error = "unreachable";
      return plan;
    }
    q = ik.q;
    plan.path.push_back(q.arm(side));
  }
  plan.q = q;
  plan.ok = true;
  return plan;
}

CommandResult Controller::hand(World& w, const HandCommand& c) {
  const Side side = side_of(c);
  std::visit([&](const auto& h) { if (h.step) step_[index(side)] = *h.step; }, c);
  HandPlan plan = preview(w, c);
  if (plan.error == "zero_length_step") return {false, plan.error, std::nullopt, {}};
  const Subsystem sub = arm_subsystem(side);
  ArmGoal payload{plan.gripper, plan.gripper_in_base, plan.fingertip};
  if (!plan.ok) return {true, {}, goals_.issue(sub, payload, w.now(), plan.error), {}};

  const auto id = goals_.issue(sub, payload, w.now());
  ArmExec ex;
  ex.goal = id;
  ex.target = plan.gripper_in_base;
  ex.t0 = w.now();
  const ArmModel& arm = w.robot().arm(side);
  const Eigen::Vector3d tip_local(arm.fingertip_offset, 0.0, 0.0);
  const Pose start = base_inverse(w) * w.gripper_pose(side);
  const double travel = (ex.target * tip_local - start * tip_local).norm();
  const double turn = angular_distance(start.orientation, ex.target.orientation);
  // Uniform in path index; slow enough that no segment exceeds a joint cap.
  double segment = 0.0;
  for (std::size_t k = 1; k < plan.path.size(); ++k)
    for (int i = 0; i < kArmJoints; ++i)
      segment = std::max(segment, std::abs(joint_delta(arm.joints[i], plan.path[k - 1][i], plan.path[k][i])) /
                                      arm.joints[i].max_velocity);
  ex.duration = std::max({travel / config_.arm_speed, turn / config_.arm_angular_speed,
                          segment * double(plan.path.size() - 1)});
  ex.path = std::move(plan.path);
  arm_[index(side)] = std::move(ex);
  return {true, {}, id, {}};
}

CommandResult Controller::gripper(World& w, const GripperCmd& c) {
  const Side s = c.side;
  const GripperSpec& gs = w.robot().gripper;
  GripperGoal g;
  if (c.open_fraction) {
    if (!(*c.open_fraction >= 0.0 && *c.open_fraction <= 1.0))
      return {false, "fraction_out_of_range", std::nullopt, {}};
    g.aperture = gs.aperture_min + *c.open_fraction * (gs.aperture_max - gs.aperture_min);
    if (w.held(s)) w.release(s);
  } else {
    g.grasp = true;
    if (w.held(s)) {
      g.aperture = w.joints().gripper(s);
      g.outcome = GraspOutcome::grasped;
      g.object = w.held(s)->object;
      const auto id = goals_.issue(gripper_subsystem(s), g, w.now());
      goals_.finish(gripper_subsystem(s), GoalState::reached, w.now());
      return {true, {}, id, {}};
    }
    g.aperture = w.probe_grasp(s).aperture;
  }
  const auto id = goals_.issue(gripper_subsystem(s), g, w.now());
  gripper_[index(s)] = GripperExec{id, g.grasp};
  if (!w.set_gripper_target(s, g.aperture)) {
    goals_.finish(gripper_subsystem(s), GoalState::aborted, w.now(), "run_stop");
    gripper_[index(s)].reset();
  }
  return {true, {}, id, {}};
}

void Controller::update_arm(World& w, Side s, Micros dt) {
  auto& ex = arm_[index(s)];
  if (!ex) return;
  const Subsystem sub = arm_subsystem(s);
  const ControlGoal* g = goals_.active(sub);
  if (!g || g->id != ex->goal) {
    ex.reset();
    return;
  }
  const ArmModel& arm = w.robot().arm(s);
  const auto progress = [&](Micros t) {
    return ex->duration > 0.0 ? std::clamp(seconds(t - ex->t0) / ex->duration, 0.0, 1.0) : 1.0;
  };

  // Arrival: the last waypoint was commanded and the joints got there.
  if (progress(w.now()) >= 1.0 && !w.arm_moving(s)) {
    const Pose reached = base_inverse(w) * w.gripper_pose(s);
    const IkOptions tol;
    const bool ok = (reached.position - ex->target.position).norm() <= tol.position_tolerance &&
                    angular_distance(reached.orientation, ex->target.orientation) <= tol.orientation_tolerance;
    goals_.finish(sub, ok ? GoalState::reached : GoalState::aborted, w.now(), ok ? "" : "tracking_error");
    ex.reset();
    if (tracking() == s) track_now_ = true;
    return;
  }

  const double u = progress(w.now() + dt) * double(ex->path.size() - 1);
  const std::size_t k = std::min(static_cast<std::size_t>(u), ex->path.size() - 2);
  const double f = u - double(k);
  ArmAngles q;
  for (int i = 0; i < kArmJoints; ++i) {
    const double a = ex->path[k][i];
    q[i] = arm.joints[i].clamp(a + f * joint_delta(arm.joints[i], a, ex->path[k + 1][i]));
  }
  if (!w.set_arm_target(s, q)) {
    goals_.finish(sub, GoalState::aborted, w.now(), "run_stop");
    ex.reset();
  }
}

void Controller::update_base(World& w) {
  ControlGoal* g = goals_.active(Subsystem::base);
  if (!g) return;
  if (w.now() - last_base_message_ > config_.deadman) {
    w.stop_base();
    goals_.finish(Subsystem::base, GoalState::aborted, w.now(), "deadman");
    return;
  }
  const auto& b = std::get<BaseGoal>(g->payload);
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  if (b.kind == BaseGoal::Kind::turn) {
    v.z() = b.yaw_rate;
  } else {
    const BasePose& base = w.base();
    const Eigen::Vector2d d_world(b.ground.x() - base.x, b.ground.y() - base.y);
    const Eigen::Vector2d d = Eigen::Rotation2Dd(-base.heading) * d_world;
    const double dist = d.norm();
    if (dist < config_.drive_stop_distance) {
      w.stop_base();
      goals_.finish(Subsystem::base, GoalState::reached, w.now());
      return;
    }
    const double speed = std::min(config_.max_linear_velocity, config_.drive_gain * dist);
    v.head<2>() = speed / dist * d;
  }
  if (!w.set_base_velocity(v)) goals_.finish(Subsystem::base, GoalState::aborted, w.now(), "run_stop");
}

void Controller::track_head(World& w) {
  const auto side = tracking();
  if (!side) {
    next_track_.reset();
    return;
  }
  if (!track_now_ && next_track_ && w.now() < *next_track_) return;
  track_now_ = false;
  next_track_ = w.now() + config_.tracking_period;
  const Eigen::Vector3d tip = base_inverse(w) * w.fingertip(*side);
  PanTilt pt;
  try {
    pt = head_look_at(w.robot().head, w.robot().camera, w.joints(), tip);
  } catch (const KinematicsError&) {
    return;
  }
  goals_.finish(Subsystem::head, GoalState::preempted, w.now(), "tracking");
  const JointVector& q = w.joints();
  if (w.head_moving() || std::abs(pt.pan - q.head_pan) > 1e-9 || std::abs(pt.tilt - q.head_tilt) > 1e-9)
    w.set_head_target(pt.pan, pt.tilt);
}

void Controller::update(World& w, Micros dt) {
  if (w.diagnostics().run_stop) {
    abort_all(w, "run_stop");
    return;
  }
  for (Side s : {Side::left, Side::right}) {
    update_arm(w, s, dt);
    auto& gx = gripper_[index(s)];
    const ControlGoal* g = goals_.active(gripper_subsystem(s));
    if (gx && (!g || g->id != gx->goal)) gx.reset();
    if (gx && !w.gripper_moving(s)) {
      ControlGoal* active = goals_.active(gripper_subsystem(s));
      auto& payload = std::get<GripperGoal>(active->payload);
      if (gx->grasp) {
        const GraspResult r = w.attempt_grasp(s);
        payload.outcome = r.outcome;
        payload.object = r.object;
      }
      goals_.finish(gripper_subsystem(s), GoalState::reached, w.now());
      gx.reset();
    }
  }
  if (goals_.active(Subsystem::torso) && !w.torso_moving())
    goals_.finish(Subsystem::torso, GoalState::reached, w.now());
  if (goals_.active(Subsystem::head) && !w.head_moving())
    goals_.finish(Subsystem::head, GoalState::reached, w.now());
  update_base(w);
  track_head(w);
}

void Controller::abort_all(World& w, const std::string& reason) {
  for (std::size_t i = 0; i < kSubsystems; ++i)
    goals_.finish(static_cast<Subsystem>(i), GoalState::aborted, w.now(), reason);
  for (Side s : {Side::left, Side::right}) {
    w.stop_arm(s);
    w.stop_gripper(s);
    arm_[index(s)].reset();
    gripper_[index(s)].reset();
  }
  w.stop_head();
  w.stop_torso();
  w.stop_base();
}

}  // namespace surrogate
