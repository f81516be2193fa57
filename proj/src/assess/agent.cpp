#include "surrogate/assess/agent.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace surrogate {

namespace {

constexpr int kResendTicks = 5;  // held drive/turn messages every 100 ms, well inside the deadman

int units(StepSize s) { return static_cast<int>(std::lround(translation_step(s) / 0.005)); }

}  // namespace

std::vector<std::pair<StepSize, bool>> vertical_steps(double dz, const std::vector<StepSize>& sizes, double tolerance) {
  const int target = static_cast<int>(std::lround(dz / 0.005));
  const int slack = static_cast<int>(std::floor(tolerance / 0.005 + 1e-9));  // whole grid units we may stop short by
  if (std::abs(dz) <= tolerance || sizes.empty()) return {};
  const int bound = std::abs(target) + 2 * units(StepSize::L);
  std::map<int, std::pair<int, int>> parent;  // value -> (previous value, signed size index)
  std::vector<int> level{0};
  parent[0] = {0, 0};
  std::optional<int> best;
  // Breadth-first by step count; the first level with a value close enough wins.
  while (!level.empty() && !best) {
    std::vector<int> next_level;
    for (int v : level)
      for (std::size_t i = 0; i < sizes.size(); ++i)
        for (int sign : {1, -1}) {
          const int next = v + sign * units(sizes[i]);
          if (std::abs(next) > bound || parent.count(next)) continue;
          parent[next] = {v, sign * static_cast<int>(i + 1)};
          next_level.push_back(next);
        }
    for (int v : next_level)
      if (std::abs(v - target) <= slack && (!best || std::abs(v - target) < std::abs(*best - target))) best = v;
    level = std::move(next_level);
  }
  if (!best) return {};
  std::vector<std::pair<StepSize, bool>> steps;
  for (int v = *best; v != 0; v = parent[v].first) {
    const int k = parent[v].second;
    steps.emplace_back(sizes[std::abs(k) - 1], k > 0);
  }
  // Travel toward the goal first, largest steps first.
  const bool up = target > 0;
  std::sort(steps.begin(), steps.end(), [&](const auto& a, const auto& b) {
    if ((a.second == up) != (b.second == up)) return a.second == up;
    return translation_step(a.first) > translation_step(b.first);
  });
  return steps;
}

Agent::Agent(TeleopCore& core, AgentOptions options)
    : core_(core),
      options_(std::move(options)),
      link_(core, options_.token, options_.link),
      client_(link_),
      rng_(options_.seed) {
  if (!link_.connected()) throw AgentFailure("server refused the agent's token");
  if (!wait([&] { return !client_.role().empty(); }, 5.0)) throw AgentFailure("no welcome from the server");
  if (client_.role() != "operator") throw AgentFailure("another client holds the operator lock");
}

double Agent::tick_seconds() const {
  return std::chrono::duration<double>(core_.session().tick_length()).count();
}

void Agent::tick() {
  if (deadline_ && now() >= *deadline_) throw AgentFailure("timeout");
  step_links(core_, {&link_});
  client_.process();
  if (observer_) observer_();
}

void Agent::idle(double seconds) {
  const Micros end = now() + std::chrono::duration_cast<Micros>(std::chrono::duration<double>(seconds));
  while (now() < end) tick();
}

bool Agent::wait(const std::function<bool()>& pred, double timeout) {
  const Micros end = now() + std::chrono::duration_cast<Micros>(std::chrono::duration<double>(timeout));
  while (!pred()) {
    if (now() >= end) return false;
    tick();
  }
  return true;
}

void Agent::think() {
  if (options_.think_time > 0.0) idle(options_.think_time);
}

Agent::Outcome Agent::act(const Command& c, double timeout) {
  const std::uint64_t seq = client_.send(c);
  if (!wait([&] { return client_.settled(seq); }, timeout))
    throw AgentFailure(std::string(command_type(c)) + " did not settle");
  Outcome o;
  const auto r = client_.reply(seq);
  o.accepted = r->accepted;
  o.reason = r->reason;
  if (r->goal) {
    o.goal = *client_.goal_message(*r->goal);
    o.state = o.goal.value("state", "");
  }
  return o;
}

Eigen::Vector2d Agent::noisy(const Eigen::Vector2d& pixel) {
  if (options_.click_noise_px <= 0.0) return pixel;
  std::normal_distribution<double> n(0.0, options_.click_noise_px);
  const CameraModel& cam = robot().camera;
  return {std::clamp(pixel.x() + n(rng_), 0.0, cam.width - 1.0), std::clamp(pixel.y() + n(rng_), 0.0, cam.height - 1.0)};
}

std::optional<Eigen::Vector2d> Agent::pixel_of(const Eigen::Vector3d& p, double margin) const {
  const CameraModel& cam = robot().camera;
  const Projection pr = project_to_pixel(cam, world().camera(), p);
  if (!pr.on_screen) return std::nullopt;
  if (pr.pixel.x() < margin || pr.pixel.y() < margin || pr.pixel.x() > cam.width - margin ||
      pr.pixel.y() > cam.height - margin)
    return std::nullopt;
  return pr.pixel;
}

void Agent::set_mode(Mode m) {
  if (mode_known_ && mode_ == m) return;
  if (!act(ModeCmd{m}).accepted) throw AgentFailure("mode " + std::string(to_string(m)) + " rejected");
  mode_ = m;
  mode_known_ = true;
}

void Agent::look_at(const Eigen::Vector3d& p) {
  set_mode(Mode::looking);
  const CameraModel& cam = robot().camera;
  const Eigen::Vector2d center(cam.cx, cam.cy);
  for (int attempt = 0; attempt < 8; ++attempt) {
    const Projection pr = project_to_pixel(cam, world().camera(), p);
    if (pr.on_screen && (pr.pixel - center).cwiseAbs().maxCoeff() < 0.25 * cam.height) return;
    Eigen::Vector2d click;
    if (pr.on_screen) {
      click = pr.pixel;
    } else {
      const double sx = 0.45 * cam.width, sy = 0.45 * cam.height;
      Eigen::Vector2d dir = Eigen::Vector2d::Zero();
      switch (pr.edge) {
        case ScreenEdge::left: dir = {-1, 0}; break;
        case ScreenEdge::right: dir = {1, 0}; break;
        case ScreenEdge::top: dir = {0, -1}; break;
        case ScreenEdge::bottom: dir = {0, 1}; break;
        case ScreenEdge::top_left: dir = {-1, -1}; break;
        case ScreenEdge::top_right: dir = {1, -1}; break;
        case ScreenEdge::bottom_left: dir = {-1, 1}; break;
        case ScreenEdge::bottom_right: dir = {1, 1}; break;
      }
      click = center + Eigen::Vector2d(dir.x() * sx, dir.y() * sy);
    }
    const Outcome o = act(LookCmd{noisy(click)});
    if (!o.accepted) throw AgentFailure("look rejected: " + o.reason);
  }
}

void Agent::drive_to(const Eigen::Vector2d& xy) {
  const double dt = tick_seconds();
  bool driving = false;
  int since = 0;
  double previous = std::numeric_limits<double>::infinity();
  const auto release = [&] {
    if (!driving) return;
    act(DriveCmd{Eigen::Vector2d::Zero(), false});
    driving = false;
  };
  for (;;) {
    const BasePose& b = world().base();
    const Eigen::Vector2d d = xy - Eigen::Vector2d(b.x, b.y);
    const double dist = d.norm();
    const double v = world().base_velocity().head<2>().norm();
    if (dist < 1e-3) break;
    if (driving && (dist <= 0.5 * v * dt || (dist < 0.05 && dist > previous))) break;
    if (driving && !world().base_moving() && dist < 0.011 && since > 0) break;  // the goal itself stopped short
    previous = dist;

    // Farthest visible ground point up to 1 m beyond the goal along the line of travel.
    const Eigen::Vector2d dir = d / dist;
    std::optional<Eigen::Vector2d> pixel;
    for (int k = 10; k >= 0 && !pixel; --k) {
      const Eigen::Vector2d p = xy + 0.1 * k * dir;
      pixel = pixel_of(Eigen::Vector3d(p.x(), p.y(), 0.0));
    }
    if (!pixel) {
      release();
      const Eigen::Vector2d p = xy + 0.5 * dir;
      look_at(Eigen::Vector3d(p.x(), p.y(), 0.0));
      continue;
    }
    set_mode(Mode::driving);
    if (!driving || since >= kResendTicks) {
      client_.send(DriveCmd{noisy(*pixel), true});
      driving = true;
      since = 0;
    }
    tick();
    ++since;
  }
  release();
}

void Agent::turn_to(double heading) {
  set_mode(Mode::driving);
  const double rate = core_.session().controller().config().max_angular_velocity;
  const double dt = tick_seconds();
  std::optional<TurnDirection> current;
  int since = 0;
  for (;;) {
    const double rem = normalize_angle(heading - world().base().heading);
    if (std::abs(rem) <= 0.5 * rate * dt) break;
    const TurnDirection dir = rem > 0 ? TurnDirection::left : TurnDirection::right;
    if (current != dir || since >= kResendTicks) {
      client_.send(TurnCmd{dir, true});
      current = dir;
      since = 0;
    }
    tick();
    ++since;
  }
  if (current) act(TurnCmd{*current, false});
}

void Agent::spine(double fraction) {
  set_mode(Mode::spine);
  think();
  const Outcome o = act(SpineCmd{std::clamp(fraction, 0.0, 1.0)});
  if (!o.reached()) throw AgentFailure("spine: " + (o.reason.empty() ? o.state : o.reason));
}

bool Agent::preview(const HandCommand& c) {
  const Command cmd = std::visit([](const auto& h) -> Command { return h; }, c);
  const std::uint64_t seq = client_.send_preview(cmd);
  if (!wait([&] { return client_.response(seq).has_value(); }, 10.0)) throw AgentFailure("no preview reply");
  return client_.response(seq)->value("ok", false);
}

bool Agent::unstick(Side s, const HandCommand& blocked) {
  for (RotateArrow arrow : {RotateArrow::pitch_pos, RotateArrow::pitch_neg, RotateArrow::yaw_pos, RotateArrow::yaw_neg,
                            RotateArrow::roll_pos, RotateArrow::roll_neg})
    for (StepSize size : {StepSize::S, StepSize::M}) {
      if (!rotate(s, arrow, size)) continue;
      if (preview(blocked)) return true;
      rotate(s, opposite(arrow), size);
    }
  return false;
}

bool Agent::hand_horizontal(Side s, const Eigen::Vector2d& xy) {
  set_mode(s == Side::left ? Mode::hand_left : Mode::hand_right);
  int unsticks = 0;
  for (int moves = 0; moves < 60; ++moves) {
    const Eigen::Vector3d tip = world().fingertip(s);
    const double dist = (xy - tip.head<2>()).norm();
    if (dist < 0.0015) return true;
    bool moved = false;
    double tried = std::numeric_limits<double>::infinity();
    for (StepSize size : {StepSize::L, StepSize::M, StepSize::S, StepSize::XS}) {
      const double length = std::min(translation_step(size), dist);
      if (length >= tried - 1e-9) continue;  // the clamp makes this the same motion
      tried = length;
      think();
      const Outcome o = act(HandStepCmd{s, Eigen::Vector3d(xy.x(), xy.y(), tip.z()), size});
      if (!o.accepted) return false;
      if (o.reached()) {
        moved = true;
        break;
      }
    }
    if (!moved) {
      const Eigen::Vector3d goal(xy.x(), xy.y(), tip.z());
      if (++unsticks > 4 || !unstick(s, HandStepCmd{s, goal, StepSize::XS})) return false;
    }
  }
  return false;
}

bool Agent::hand_vertical(Side s, double z, double tolerance) {
  set_mode(s == Side::left ? Mode::hand_left : Mode::hand_right);
  const std::vector<StepSize> all{StepSize::L, StepSize::M, StepSize::S, StepSize::XS};
  std::vector<StepSize> sizes = all;  // sizes not yet found unreachable from here
  int unsticks = 0;
  for (int moves = 0; moves < 60; ++moves) {
    const double dz = z - world().fingertip(s).z();
    if (std::abs(dz) <= tolerance) return true;
    const auto plan = vertical_steps(dz, sizes, tolerance);
    if (plan.empty()) {
      if (sizes.size() == all.size()) return false;  // no combination lands within tolerance
      if (++unsticks > 4 || !unstick(s, HandVerticalCmd{s, dz > 0, StepSize::XS})) return false;
      sizes = all;
      continue;
    }
    const auto [size, up] = plan.front();
    think();
    const Outcome o = act(HandVerticalCmd{s, up, size});
    if (!o.accepted) return false;
    if (o.reached()) {
      sizes = all;
    } else {
      sizes.erase(std::find(sizes.begin(), sizes.end(), size));
    }
  }
  return false;
}

bool Agent::hand_to(Side s, const Eigen::Vector3d& tip, bool vertical_first, double tolerance) {
  if (vertical_first) return hand_vertical(s, tip.z(), tolerance) && hand_horizontal(s, tip.head<2>());
  return hand_horizontal(s, tip.head<2>()) && hand_vertical(s, tip.z(), tolerance);
}

bool Agent::rotate(Side s, RotateArrow arrow, StepSize step) {
  set_mode(s == Side::left ? Mode::hand_left : Mode::hand_right);
  think();
  return act(HandRotateCmd{s, arrow, step}).reached();
}

void Agent::open_gripper(Side s, double fraction) {
  set_mode(s == Side::left ? Mode::hand_left : Mode::hand_right);
  think();
  const Outcome o = act(GripperCmd{s, fraction});
  if (!o.reached()) throw AgentFailure("gripper open: " + (o.reason.empty() ? o.state : o.reason));
}

std::string Agent::grasp(Side s) {
  set_mode(s == Side::left ? Mode::hand_left : Mode::hand_right);
  think();
  const Outcome o = act(GripperCmd{s, std::nullopt});
  if (!o.accepted) throw AgentFailure("grasp rejected: " + o.reason);
  return o.goal.value("outcome", o.state);
}

}  // namespace surrogate
