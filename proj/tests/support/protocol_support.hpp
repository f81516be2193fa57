#pragma once

#include <random>

#include "sim_support.hpp"
#include "surrogate/server/scripted_client.hpp"
#include "surrogate/telemetry/recorded_session.hpp"

namespace surrogate::test {

/// A served session recorded into memory.
struct Rig {
  explicit Rig(const std::string& scene_name = "empty", CoreOptions options = {}, Scene extra = {})
      : session(robot_ptr(), with_extra(test::scene(scene_name), extra)),
        recorder("test", sink),
        recorded(session, recorder),
        core(recorded, std::move(options)) {}

  static Scene with_extra(Scene s, const Scene& extra) {
    for (const auto& o : extra.objects) s.objects.push_back(o);
    return s;
  }

  Session session;
  MemorySink sink;
  Recorder recorder;
  RecordedSession recorded;
  TeleopCore core;
};

inline void idle(TeleopCore& core, const std::vector<LoopbackLink*>& links, std::vector<ScriptedClient*> clients,
                 double secs) {
  const int n = static_cast<int>(std::lround(secs / 0.02));
  for (int i = 0; i < n; ++i) {
    step_links(core, links);
    for (auto* c : clients) c->process();
  }
}

struct ScriptOutcome {
  std::size_t commands = 0;
  std::size_t replies = 0;
  std::size_t accepted = 0;
  std::size_t goals_issued = 0;   // "active" goal events seen
  std::size_t goals_finished = 0; // terminal goal events seen
  std::size_t goals_reached = 0;
  std::size_t duplicates = 0;
  std::size_t gaps = 0;
  bool timed_out = false;
  JointVector q;
  BasePose base;
  std::vector<std::string> held;
  std::vector<std::string> kinds;  // the command types, in order
};

/// A step-wise operator: it sends one command, waits until the reply and the
/// resulting goal are in, then until two consecutive snapshots show the robot
/// at rest, and only then chooses the next command from what it has seen.
inline ScriptOutcome run_stepwise_script(std::size_t n, LinkOptions link_options, std::uint64_t seed) {
  Rig rig("empty");
  LoopbackLink link(rig.core, rig.core.options().token, link_options);
  ScriptedClient client(link);
  std::mt19937_64 rng(seed);
  auto uniform = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto pick = [&](int k) { return static_cast<int>(std::uniform_int_distribution<int>(0, k - 1)(rng)); };

  ScriptOutcome out;
  const auto fingertip = [&](Side s) {
    const auto& v = client.state()["fingertips"][std::string(to_string(s))];
    return Eigen::Vector3d(v[0], v[1], v[2]);
  };
  const auto at_rest = [&](const nlohmann::json& prev) {
    if (prev.is_null() || client.state().is_null() || prev["joints"] != client.state()["joints"]) return false;
    for (const auto& g : client.state()["goals"])
      if (g["state"] == "active") return false;
    return true;
  };

  // Wait for the welcome and a first snapshot.
  idle(rig.core, {&link}, {&client}, 2.0);
  const Eigen::Vector3d home[2] = {fingertip(Side::left), fingertip(Side::right)};

  Side side = Side::right;
  const long max_ticks = static_cast<long>(n) * 1000 + 10'000;
  long ticks = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Command c;
    const int kind = pick(10);
    if (kind == 0) {
      side = pick(2) ? Side::right : Side::left;
      c = ModeCmd{side == Side::left ? Mode::hand_left : Mode::hand_right};
    } else if (kind <= 4) {
      const Eigen::Vector3d tip = fingertip(side);
      const Eigen::Vector3d& h = home[index(side)];
      Eigen::Vector3d d(std::cos(uniform(0, 6.28)), std::sin(uniform(0, 6.28)), 0.0);
      if ((tip - h).head<2>().norm() > 0.12) d = (h - tip).normalized();
      d.z() = 0.0;
      c = HandStepCmd{side, tip + 0.3 * d, pick(2) ? StepSize::XS : StepSize::S};
    } else if (kind == 5) {
      const bool up = fingertip(side).z() < home[index(side)].z() ? true : fingertip(side).z() > home[index(side)].z() + 0.08 ? false : pick(2);
      c = HandVerticalCmd{side, up, StepSize::XS};
    } else if (kind == 6) {
      c = HandRotateCmd{side, static_cast<RotateArrow>(pick(6)), StepSize::XS};
    } else if (kind == 7) {
      c = GripperCmd{side, uniform(0.0, 1.0)};
    } else if (kind == 8) {
      c = SpineCmd{uniform(0.0, 1.0)};
    } else {
      c = StepSizeCmd{side, static_cast<StepSize>(pick(4))};
    }
    out.kinds.emplace_back(command_type(c));
    const std::uint64_t seq = client.send(c);
    ++out.commands;
    nlohmann::json prev;
    for (;;) {
      step_links(rig.core, {&link});
      client.process();
      if (++ticks > max_ticks) {
        out.timed_out = true;
        break;
      }
      if (!client.settled(seq)) continue;
      if (at_rest(prev)) break;
      if (!client.state().is_null() && client.state() != prev) prev = client.state();
    }
    if (out.timed_out) break;
  }
  idle(rig.core, {&link}, {&client}, 3.0);

  for (const auto& e : client.events()) {
    const std::string type = e["type"];
    if (type == "ack" || type == "rejected") ++out.replies;
    if (type == "ack") ++out.accepted;
    if (type == "goal") (e["state"] == "active" ? out.goals_issued : out.goals_finished)++;
    if (type == "goal" && e["state"] == "reached") ++out.goals_reached;
  }
  out.duplicates = client.duplicates();
  out.gaps = client.seq_gaps() + client.event_gaps();
  const World& w = rig.session.world();
  out.q = w.joints();
  out.base = w.base();
  for (Side s : {Side::left, Side::right}) out.held.push_back(w.held(s) ? w.held(s)->object : "");
  return out;
}

}  // namespace surrogate::test
