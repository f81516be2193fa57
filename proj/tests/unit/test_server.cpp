#include <set>

#include <doctest.h>

#include "protocol_support.hpp"
#include "surrogate/server/restriction.hpp"

using namespace surrogate;
using nlohmann::json;
using test::Rig;

namespace {

// One command per controllable DoF (the drive covers both planar base DoFs).
std::vector<Command> dof_catalog() {
  std::vector<Command> cs = {LookCmd{{480, 270}}, DriveCmd{{480, 500}, false}, TurnCmd{TurnDirection::left, false},
                             SpineCmd{0.5}};
  for (Side s : {Side::left, Side::right}) {
    cs.push_back(HandStepCmd{s, {1.0, 0.0, 0.8}, std::nullopt});
    cs.push_back(HandVerticalCmd{s, true, std::nullopt});
    for (auto a : {RotateArrow::roll_pos, RotateArrow::pitch_pos, RotateArrow::yaw_pos})
      cs.push_back(HandRotateCmd{s, a, std::nullopt});
    cs.push_back(GripperCmd{s, 1.0});
  }
  return cs;
}

std::vector<json> drain_json(TeleopCore& core, ClientId id) {
  std::vector<json> out;
  for (const auto& s : core.drain(id)) out.push_back(json::parse(s));
  return out;
}

std::vector<json> of_type(const std::vector<json>& ms, const std::string& type) {
  std::vector<json> out;
  for (const auto& m : ms)
    if (m["type"] == type) out.push_back(m);
  return out;
}

std::string msg(std::uint64_t seq, const std::string& type, json extra = json::object()) {
  extra["seq"] = seq;
  extra["type"] = type;
  return extra.dump();
}

std::string command_msg(std::uint64_t seq, const Command& c) {
  return msg(seq, "command", {{"command", command_to_json(c)}});
}

}  // namespace

TEST_CASE("restriction masks: full has 20 DoF, arat(side) exactly 9") {
  CHECK(Restriction::full().enabled().count() == 20);
  for (Side s : {Side::left, Side::right}) {
    const DofMask m = Restriction::arat(s).enabled();
    CHECK(m.count() == 9);
    CHECK(m.test(bit(Dof::head_pan)));
    CHECK(m.test(bit(Dof::head_tilt)));
    CHECK_FALSE(m.test(bit(Dof::base_x)));
    CHECK_FALSE(m.test(bit(Dof::torso)));
    CHECK(m.test(bit(s == Side::left ? Dof::left_gripper : Dof::right_gripper)));
    CHECK_FALSE(m.test(bit(s == Side::left ? Dof::right_gripper : Dof::left_gripper)));
  }
  DofMask all;
  for (const auto& c : dof_catalog()) all |= required_dofs(c);
  CHECK(all.count() == 20);
  CHECK(required_dofs(StepSizeCmd{Side::left, StepSize::L}).none());
  CHECK(required_dofs(ModeCmd{Mode::driving}).none());

  CHECK(parse_restriction("full")->kind == Restriction::Kind::full);
  CHECK(parse_restriction("arat(left)")->side == Side::left);
  CHECK(parse_restriction("arat:right")->side == Side::right);
  CHECK_FALSE(parse_restriction("arat"));
  CHECK_FALSE(parse_restriction("partial"));
}

TEST_CASE("arat(right) over the wire: the 9 DoF pass, the rest are rejected citing the mode") {
  CoreOptions opts;
  opts.restriction = Restriction::arat(Side::right);
  Rig rig("empty", opts);
  const ClientId id = *rig.core.connect(opts.token);
  const auto cs = dof_catalog();
  for (std::size_t i = 0; i < cs.size(); ++i) rig.core.receive(id, command_msg(i + 1, cs[i]));
  rig.core.step();
  const auto ms = drain_json(rig.core, id);

  DofMask accepted, rejected;
  for (const auto& m : ms) {
    if (m["type"] != "ack" && m["type"] != "rejected") continue;
    const DofMask d = required_dofs(cs[m["ack"].get<std::size_t>() - 1]);
    if (m["type"] == "ack") {
      accepted |= d;
    } else {
      rejected |= d;
      CHECK(m["reason"].get<std::string>().find("arat(right)") != std::string::npos);
    }
  }
  CHECK(accepted.count() == 9);
  CHECK(accepted == Restriction::arat(Side::right).enabled());
  CHECK(rejected.count() == 11);
  CHECK((accepted & rejected).none());

  // Lifting the restriction lets the drive through.
  rig.core.admin(RestrictionCmd{"full", Side::right});
  rig.core.receive(id, command_msg(100, TurnCmd{TurnDirection::left, false}));
  rig.core.step();
  const auto after = drain_json(rig.core, id);
  CHECK(of_type(after, "ack").size() == 1);
  CHECK(of_type(after, "restriction").size() == 1);
}

TEST_CASE("tokens, operator lock and spectators") {
  Rig rig;
  CHECK_FALSE(rig.core.connect("wrong"));
  const ClientId a = *rig.core.connect(rig.core.options().token);
  const ClientId b = *rig.core.connect(rig.core.options().token);
  CHECK(rig.core.operator_client() == a);
  CHECK(of_type(drain_json(rig.core, a), "welcome")[0]["role"] == "operator");
  CHECK(of_type(drain_json(rig.core, b), "welcome")[0]["role"] == "spectator");

  const JointVector before = rig.session.world().joints();
  rig.core.receive(b, command_msg(1, SpineCmd{1.0}));
  rig.core.receive(b, msg(2, "claim_lock"));
  for (int i = 0; i < 50; ++i) rig.core.step();
  auto ms = drain_json(rig.core, b);
  REQUIRE(of_type(ms, "rejected").size() == 1);
  CHECK(of_type(ms, "rejected")[0]["reason"] == "not the operator");
  CHECK(of_type(ms, "lock")[0]["role"] == "spectator");  // held by a
  CHECK(rig.session.world().joints() == before);
  std::size_t logged = 0;
  for (const auto& r : rig.sink.records) logged += r.kind == RecordKind::command;
  CHECK(logged == 0);  // never dispatched, never logged

  rig.core.disconnect(a);
  CHECK_FALSE(rig.core.operator_client());  // no automatic transfer
  rig.core.receive(b, msg(3, "claim_lock"));
  rig.core.step();
  CHECK(of_type(drain_json(rig.core, b), "lock")[0]["role"] == "operator");
  CHECK(rig.core.operator_client() == b);
}

TEST_CASE("stale and duplicate sequence numbers are dropped silently") {
  Rig rig;
  const ClientId id = *rig.core.connect(rig.core.options().token);
  rig.core.receive(id, command_msg(5, SpineCmd{0.2}));
  rig.core.receive(id, command_msg(5, SpineCmd{0.9}));
  rig.core.receive(id, command_msg(3, SpineCmd{0.9}));
  rig.core.receive(id, command_msg(6, SpineCmd{0.4}));
  rig.core.step();
  const auto ms = drain_json(rig.core, id);
  const auto acks = of_type(ms, "ack");
  REQUIRE(acks.size() == 2);
  CHECK(acks[0]["ack"] == 5);
  CHECK(acks[1]["ack"] == 6);
  CHECK(of_type(ms, "rejected").empty());
}

TEST_CASE("malformed messages are rejected with a reason") {
  Rig rig;
  const ClientId id = *rig.core.connect(rig.core.options().token);
  const std::vector<std::pair<std::string, std::string>> bad = {
      {"{not json", "malformed JSON"},
      {R"([1,2])", "JSON object"},
      {R"({"type":"command"})", "seq"},
      {R"({"seq":-3,"type":"command"})", "seq"},
      {R"({"seq":1})", "type"},
      {R"({"seq":2,"type":"teleport"})", "unknown message type"},
      {R"({"seq":3,"type":"command"})", "command"},
      {R"({"seq":4,"type":"command","command":{"type":"spine"}})", "fraction"},
      {R"({"seq":5,"type":"command","command":{"type":"hand_step","side":"middle","point":[1,0,1]}})", "side"},
      {R"({"seq":6,"type":"preview","command":{"type":"spine","fraction":0.5}})", "hand commands"},
      {R"({"seq":7,"type":"peek","side":"left","stride":0})", "stride"},
      {R"({"seq":8,"type":"admin","admin":{"type":"run_stop","engaged":true},"token":"x"})", "not authorized"},
  };
  for (const auto& [text, _] : bad) rig.core.receive(id, text);
  rig.core.step();
  const auto rejected = of_type(drain_json(rig.core, id), "rejected");
  REQUIRE(rejected.size() == bad.size());
  for (std::size_t i = 0; i < bad.size(); ++i) {
    INFO(bad[i].first);
    CHECK(rejected[i]["reason"].get<std::string>().find(bad[i].second) != std::string::npos);
  }
  CHECK_FALSE(rig.session.world().diagnostics().run_stop);
}

TEST_CASE("every acknowledged command is already in the log") {
  Rig rig;
  LoopbackLink link(rig.core, rig.core.options().token);
  ScriptedClient client(link);
  test::idle(rig.core, {&link}, {&client}, 0.2);
  std::vector<std::uint64_t> seqs;
  for (int i = 0; i < 20; ++i) {
    seqs.push_back(client.send(i % 2 ? Command{SpineCmd{0.05 * i}} : Command{ModeCmd{Mode::hand_left}}));
    link.pump_uplink();
    rig.core.step();
    // At the moment the acks leave the server, the log must already hold them.
    for (const auto& text : rig.core.drain(link.id())) {
      const json m = json::parse(text);
      if (m["type"] != "ack") continue;
      bool found = false;
      for (const auto& r : rig.sink.records)
        found |= r.kind == RecordKind::command && r.data.value("seq", std::uint64_t{0}) == m["ack"];
      CHECK(found);
    }
  }
}

TEST_CASE("idle robot: snapshots at 10 Hz, diagnostics and heartbeats at 1 Hz, all stamped") {
  Rig rig;
  const ClientId id = *rig.core.connect(rig.core.options().token);
  std::vector<json> ms;
  for (int i = 0; i < 500; ++i) {  // 10 s
    rig.core.step();
    rig.core.receive(id, msg(i + 1, "heartbeat"));
    for (auto& m : drain_json(rig.core, id)) ms.push_back(std::move(m));
  }
  // One extra of each from the connect-time snapshot.
  CHECK(of_type(ms, "state").size() == doctest::Approx(101).epsilon(0.011));
  CHECK(of_type(ms, "scene").size() == doctest::Approx(101).epsilon(0.011));
  CHECK(of_type(ms, "diagnostics").size() == 11);
  CHECK(of_type(ms, "heartbeat").size() == 10);
  std::uint64_t seq = 0;
  for (const auto& m : ms) {
    REQUIRE(m.contains("seq"));
    REQUIRE(m.contains("t"));
    CHECK(m["seq"] == ++seq);
  }
  const auto states = of_type(ms, "state");
  for (std::size_t i = 2; i < states.size(); ++i)
    CHECK(states[i]["t"].get<long>() - states[i - 1]["t"].get<long>() == 100'000);
  CHECK_FALSE(rig.core.closed(id));
}

TEST_CASE("a slow reader gets every event but only the latest snapshot") {
  Rig rig;
  const ClientId id = *rig.core.connect(rig.core.options().token);
  for (int i = 0; i < 10; ++i) rig.core.receive(id, command_msg(i + 1, SpineCmd{0.1 * i}));
  for (int i = 0; i < 100; ++i) rig.core.step();
  const auto ms = drain_json(rig.core, id);
  CHECK(of_type(ms, "ack").size() == 10);
  CHECK(of_type(ms, "state").size() == 1);
  CHECK(of_type(ms, "scene").size() == 1);
  // The coalesced snapshot is the newest one.
  const long age = rig.session.now().count() - of_type(ms, "state")[0]["t"].get<long>();
  CHECK(age >= 0);
  CHECK(age < 100'000);
}

TEST_CASE("contact onset precedes the snapshot in the same flush") {
  // An overhead box 2 cm above where it would first touch the raised arm; lifting the torso runs into it.
  const World probe(test::robot_ptr(), test::scene("empty"));
  const Eigen::Vector3d top = probe.host_frame(SkinHost::forearm_right) * Eigen::Vector3d(0.16, 0, 0);
  const auto scene_with_box = [&](double z) {
    Scene s;
    s.objects.push_back(test::make_box("shelf", {0.04, 0.04, 0.04}, {top.x(), top.y(), z}));
    return s;
  };
  double z = top.z() + 0.3;
  while (z > top.z() && World(test::robot_ptr(), Rig::with_extra(test::scene("empty"), scene_with_box(z)))
                            .detect_contacts()
                            .empty())
    z -= 0.001;
  REQUIRE(z > top.z());
  const Scene extra = scene_with_box(z + 0.02);
  Rig rig("empty", {}, extra);
  REQUIRE(rig.session.world().detect_contacts().empty());

  const ClientId id = *rig.core.connect(rig.core.options().token);
  rig.core.receive(id, command_msg(1, SpineCmd{1.0}));
  bool seen = false;
  for (int flush = 0; flush < 100 && !seen; ++flush) {
    for (int i = 0; i < 5; ++i) rig.core.step();
    const auto ms = drain_json(rig.core, id);
    bool snapshot_seen = false;
    for (const auto& m : ms) {
      const bool snapshot = m["type"] == "state" || m["type"] == "scene" || m["type"] == "diagnostics";
      CHECK_FALSE((snapshot_seen && !snapshot));  // nothing reliable after a snapshot
      snapshot_seen |= snapshot;
      if (m["type"] == "contact" && m["phase"] == "onset") {
        CHECK(m["patch"] == "forearm_R");
        CHECK(m["object"] == "shelf");
        seen = true;
      }
    }
    if (seen) CHECK(of_type(ms, "state").size() == 1);
  }
  CHECK(seen);
}

TEST_CASE("goal transitions reach spectators too") {
  Rig rig;
  LoopbackLink op(rig.core, rig.core.options().token), watcher(rig.core, rig.core.options().token);
  ScriptedClient a(op), b(watcher);
  test::idle(rig.core, {&op, &watcher}, {&a, &b}, 0.2);
  const auto seq = a.send(SpineCmd{1.0});
  test::idle(rig.core, {&op, &watcher}, {&a, &b}, 8.0);
  REQUIRE(a.settled(seq));
  const auto goal = *a.reply(seq)->goal;
  CHECK(a.goal_state(goal) == "reached");
  CHECK(b.goal_state(goal) == "reached");
  CHECK(b.role() == "spectator");
}

TEST_CASE("previews and peeks answer without moving anything") {
  Rig rig("selfcare");
  LoopbackLink link(rig.core, rig.core.options().token);
  ScriptedClient client(link);
  test::idle(rig.core, {&link}, {&client}, 0.2);
  const JointVector q = rig.session.world().joints();
  const Eigen::Vector3d tip = rig.session.world().fingertip(Side::right);
  const Command step = HandStepCmd{Side::right, tip + Eigen::Vector3d(0.5, 0, 0), StepSize::S};
  const auto pv = client.send_preview(step);
  const auto pk = client.send_message({{"type", "peek"}, {"side", "right"}});
  test::idle(rig.core, {&link}, {&client}, 0.2);
  const auto preview = client.response(pv);
  REQUIRE(preview);
  CHECK((*preview)["ok"] == true);
  const HandPlan plan = rig.session.controller().preview(rig.session.world(), *as_hand_command(step));
  CHECK((*preview)["pose"] == pose_json(plan.gripper));
  REQUIRE(client.response(pk));
  CHECK((*client.response(pk))["points"].is_array());
  CHECK(rig.session.world().joints() == q);
}

TEST_CASE("admin messages need the admin token") {
  CoreOptions opts;
  opts.admin_token = "boss";
  Rig rig("empty", opts);
  const ClientId id = *rig.core.connect(opts.token);
  rig.core.receive(id, msg(1, "admin", {{"token", "boss"}, {"admin", admin_to_json(RunStopCmd{true})}}));
  rig.core.step();
  CHECK(of_type(drain_json(rig.core, id), "ack").size() == 1);
  CHECK(rig.session.world().diagnostics().run_stop);
}

TEST_CASE("ten seconds of silence closes the session") {
  Rig rig;
  const ClientId id = *rig.core.connect(rig.core.options().token);
  for (int i = 0; i < 499; ++i) rig.core.step();
  CHECK_FALSE(rig.core.closed(id));
  rig.core.step();
  rig.core.step();
  CHECK(rig.core.closed(id));
  CHECK(of_type(drain_json(rig.core, id), "closed").size() == 1);
  CHECK_FALSE(rig.core.operator_client());
}

TEST_CASE("step-wise script under 500 +- 200 ms jitter ends where the zero-latency run does") {
  const std::size_t n = 120;
  const auto direct = test::run_stepwise_script(n, {}, 11);
  const auto jittery = test::run_stepwise_script(n, {Micros{300'000}, Micros{400'000}, 7}, 11);
  for (const auto* r : {&direct, &jittery}) {
    CHECK_FALSE(r->timed_out);
    CHECK(r->commands == n);
    CHECK(r->replies == n);
    CHECK(r->duplicates == 0);
    CHECK(r->gaps == 0);
    CHECK(r->goals_finished == r->goals_issued);
  }
  CHECK(jittery.kinds == direct.kinds);
  CHECK(jittery.accepted == direct.accepted);
  CHECK(jittery.goals_issued == direct.goals_issued);
  CHECK(jittery.q == direct.q);
  CHECK(jittery.base.x == direct.base.x);
  CHECK(jittery.base.y == direct.base.y);
  CHECK(jittery.base.heading == direct.base.heading);
  CHECK(jittery.held == direct.held);
  // The script actually moved the robot.
  CHECK(direct.goals_reached > n / 2);
  CHECK_FALSE(direct.q == test::Rig().session.world().joints());
}
