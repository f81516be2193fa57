#include <doctest.h>

#include <random>

#include "sim_support.hpp"
#include "surrogate/sim/render.hpp"

using namespace surrogate;
using test::make_box;
using test::robot;
using test::robot_ptr;

namespace {

constexpr Micros kTick{20000};

World empty_world() { return World(robot_ptr(), test::scene("empty")); }

// Places a liftable box centred on the right fingertip.
World world_with_block(double size, double aperture) {
  Scene s = test::scene("empty");
  s.start.q.gripper(Side::right) = aperture;
  World probe(robot_ptr(), s);
  const Eigen::Vector3d tip = probe.fingertip(Side::right);
  s.objects.push_back(make_box("block", Eigen::Vector3d::Constant(size), tip, MassClass::liftable));
  return World(robot_ptr(), s);
}

double capsule_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& p) {
  return (p - closest_on_segment(a, b, p)).norm();
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("self-care scene places the bottle about two meters ahead") {
  const Scene s = test::scene("selfcare");
  const WorldObject* bottle = s.find("bottle");
  REQUIRE(bottle);
  CHECK(bottle->mass == MassClass::liftable);
  REQUIRE(bottle->attachment);
  const Eigen::Vector2d ahead = bottle->pose.position.head<2>() - Eigen::Vector2d(s.start.base.x, s.start.base.y);
  CHECK(ahead.x() == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::abs(ahead.y()) < 0.3);
  REQUIRE(s.anchors.count("mouth_center"));
  const double mouth_z = s.anchors.at("mouth_center").z();
  CHECK(mouth_z > 1.0);
  CHECK(mouth_z < 1.3);
  // the bottle rests on the shelf
  const WorldObject* shelf = s.find("shelf");
  REQUIRE(shelf);
  const Eigen::Vector3d below = bottle->pose.position - Eigen::Vector3d(0, 0, 0.1 + 1e-4);
  CHECK(shelf->sdf(below) < 1e-3);
}

TEST_CASE("empty scene has only the robot") {
  const World w = empty_world();
  CHECK(w.objects().empty());
  CHECK(w.overlaps().empty());
  CHECK(w.joints().arm(Side::left) == robot().arm(Side::left).nominal);
}

TEST_CASE("ARAT scene defines 19 items placed one at a time") {
  const Scene s = test::scene("arat");
  CHECK(s.items.size() == 19);
  const Scene one = select_item(s, "grasp_block_5", Side::right);
  int liftable = 0;
  for (const auto& o : one.objects) liftable += o.mass == MassClass::liftable;
  CHECK(liftable == 1);
  CHECK(one.find("block_5"));
  CHECK(one.find("table"));
  CHECK_FALSE(one.find("arat_mannequin"));
  CHECK(one.anchors.count("target"));

  const Scene gross = select_item(s, "gross_mouth", Side::right);
  CHECK(gross.find("arat_mannequin"));
  CHECK_FALSE(gross.find("table"));

  // the mannequin head sits midway between the robot centre and the tested shoulder
  const double shoulder_y = robot().arm(Side::right).mount.translation().y();
  CHECK(gross.anchors.at("mannequin_head").y() == doctest::Approx(shoulder_y / 2).epsilon(0.01));

  const Scene left = select_item(s, "grasp_block_5", Side::left);
  CHECK(left.find("block_5")->pose.position.y() == doctest::Approx(-one.find("block_5")->pose.position.y()));
  CHECK(left.anchors.at("target").y() == doctest::Approx(-one.anchors.at("target").y()));
  const Scene gross_left = select_item(s, "gross_mouth", Side::left);
  CHECK(gross_left.anchors.at("mannequin_head").y() == doctest::Approx(-shoulder_y / 2).epsilon(0.01));
  CHECK_THROWS_AS(select_item(s, "no_such_item", Side::right), SceneError);
}

TEST_CASE("malformed scenes report the field") {
  auto doc = test::read_json(test::config_dir() / "scenes" / "selfcare.json");
  doc["objects"][1]["id"] = "shelf";
  try {
    parse_scene(doc, robot());
    FAIL("expected SceneError");
  } catch (const SceneError& e) {
    CHECK(e.field() == "/objects/1/id");
  }
  auto neg = test::read_json(test::config_dir() / "scenes" / "selfcare.json");
  neg["objects"][0]["parts"][0]["size"][0] = -1.0;
  CHECK_THROWS_AS(parse_scene(neg, robot()), SceneError);
  auto wide = test::read_json(test::config_dir() / "scenes" / "selfcare.json");
  wide["objects"][1]["grasp_width"] = 2.0;
  CHECK_THROWS_AS(parse_scene(wide, robot()), SceneError);
  // line/column from the JSON parser
  const auto tmp = std::filesystem::temp_directory_path() / "bad_scene.json";
  std::ofstream(tmp) << "{\n  \"objects\": [,]\n}\n";
  try {
    load_scene(tmp, robot());
    FAIL("expected SceneError");
  } catch (const SceneError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("quiescent step changes only clock and battery") {
  World w(robot_ptr(), test::scene("selfcare"));
  const World before = w;
  for (int i = 0; i < 50; ++i) w.step(kTick);
  CHECK(w.joints() == before.joints());
  CHECK(w.base() == before.base());
  for (std::size_t i = 0; i < w.objects().size(); ++i) {
    CHECK(w.objects()[i].pose.position == before.objects()[i].pose.position);
    CHECK(w.objects()[i].pose.orientation.coeffs() == before.objects()[i].pose.orientation.coeffs());
  }
  CHECK(w.now() == Micros(1'000'000));
  CHECK(w.diagnostics().battery < before.diagnostics().battery);
  CHECK(w.diagnostics().battery == doctest::Approx(1.0 - 1.0 / (8 * 3600.0)));
}

TEST_CASE("arm targets are approached at the joint velocity caps") {
  Scene s = test::scene("empty");
  s.start.q.arm(Side::left)[4] = 3.0;
  World w(robot_ptr(), s);
  ArmAngles target = robot().arm(Side::left).nominal;
  target[0] += 0.8;
  target[3] -= 0.6;
  target[4] = -3.0;  // continuous joint: 0.28 rad the short way through +-pi
  REQUIRE(w.set_arm_target(Side::left, target));
  w.set_arm_target(Side::right, robot().arm(Side::right).nominal);
  ArmAngles prev = w.joints().arm(Side::left);
  int steps = 0;
  while (w.arm_moving(Side::left) && steps < 1000) {
    w.step(kTick);
    ++steps;
    const ArmAngles now = w.joints().arm(Side::left);
    for (int i = 0; i < kArmJoints; ++i) {
      const Joint& j = robot().arm(Side::left).joints[i];
      const double d = j.continuous ? normalize_angle(now[i] - prev[i]) : now[i] - prev[i];
      CHECK(std::abs(d) <= j.max_velocity * 0.02 + 1e-12);
    }
    prev = now;
  }
  CHECK_FALSE(w.arm_moving(Side::left));
  CHECK(w.joints().arm(Side::left).isApprox(target, 1e-12));
  CHECK(steps == 40);  // 0.8 rad at 1 rad/s
  CHECK_FALSE(w.arm_moving(Side::right));
}

TEST_CASE("torso, head and gripper respect their caps and limits") {
  World w = empty_world();
  w.set_torso_target(1.0);  // clamped to travel
  w.set_head_target(0.3, -2.0);
  w.set_gripper_target(Side::left, 0.09);
  for (int i = 0; i < 400; ++i) {
    const JointVector a = w.joints();
    w.step(kTick);
    const JointVector& b = w.joints();
    CHECK(std::abs(b.torso_lift - a.torso_lift) <= 0.05 * 0.02 + 1e-12);
    CHECK(std::abs(b.head_tilt - a.head_tilt) <= 1.5 * 0.02 + 1e-12);
    CHECK(std::abs(b.gripper(Side::left) - a.gripper(Side::left)) <= 0.04 * 0.02 + 1e-12);
  }
  CHECK(w.joints().torso_lift == doctest::Approx(0.3));
  CHECK(w.joints().head_tilt == doctest::Approx(-0.5));
  CHECK(w.joints().gripper(Side::left) == doctest::Approx(0.09));
  CHECK(within_limits(robot(), w.joints()));
}

TEST_CASE("base velocity integrates in the base frame and is capped") {
  World w = empty_world();
  w.set_base_velocity({1.0, 0.0, 0.0});
  CHECK(w.base_velocity().x() == doctest::Approx(0.3));
  for (int i = 0; i < 50; ++i) w.step(kTick);
  CHECK(w.base().x == doctest::Approx(0.3));
  w.set_base_velocity({0.0, 0.0, 2.0});
  CHECK(w.base_velocity().z() == doctest::Approx(0.5));
  for (int i = 0; i < 50; ++i) w.step(kTick);
  CHECK(w.base().heading == doctest::Approx(0.5));
  w.set_base_velocity({0.2, 0.0, 0.0});
  for (int i = 0; i < 50; ++i) w.step(kTick);
  CHECK(w.base().x == doctest::Approx(0.3 + 0.2 * std::cos(0.5)));
  CHECK(w.base().y == doctest::Approx(0.2 * std::sin(0.5)));
}

TEST_CASE("run-stop zeroes motion, does not auto-resume and is idempotent") {
  World w = empty_world();
  w.set_base_velocity({0.3, 0, 0});
  ArmAngles t = robot().arm(Side::right).nominal;
  t[0] -= 0.5;
  w.set_arm_target(Side::right, t);
  w.step(kTick);
  w.set_run_stop(true);
  w.set_run_stop(true);
  const World stopped = w;
  w.step(kTick);
  CHECK(w.base_velocity().isZero());
  CHECK(w.base() == stopped.base());
  CHECK(w.joints() == stopped.joints());
  CHECK_FALSE(w.set_base_velocity({0.3, 0, 0}));
  w.set_run_stop(false);
  for (int i = 0; i < 10; ++i) w.step(kTick);
  CHECK(w.joints() == stopped.joints());
  CHECK(w.base() == stopped.base());
  CHECK_FALSE(w.arm_moving(Side::right));
}

TEST_CASE("forearm against a table edge gives one arm contact on the patch") {
  World probe = empty_world();
  const SkinPatchSpec* forearm = nullptr;
  for (const auto& p : robot().skin)
    if (p.id == "forearm_R") forearm = &p;
  REQUIRE(forearm);
  const Eigen::Isometry3d T = probe.host_frame(forearm->host);
  const Eigen::Vector3d a = T * forearm->start, b = T * forearm->end;
  const Eigen::Vector3d mid = 0.5 * (a + b);
  Scene s = test::scene("empty");
  // table top 3 cm under the forearm axis, front edge right under its midpoint
  s.objects.push_back(make_box("table", {0.6, 1.2, 0.04}, mid + Eigen::Vector3d(0.3, 0.0, -0.03 - 0.02 - 0.0)));
  World w(robot_ptr(), s);
  const auto events = w.detect_contacts();
  int forearm_events = 0;
  for (const auto& e : events) {
    if (e.patch != "forearm_R") continue;
    ++forearm_events;
    CHECK(e.kind == PatchKind::arm);
    CHECK(e.phase == ContactPhase::onset);
    CHECK(std::abs(capsule_distance(a, b, e.world) - forearm->radius) < 1e-3);
    CHECK(w.object("table")->sdf(e.world) < 1e-3);
    CHECK((w.host_frame(forearm->host) * e.local - e.world).norm() < 1e-9);
  }
  CHECK(forearm_events == 1);
  // persisting overlap is ongoing, then released exactly once
  for (const auto& e : w.detect_contacts())
    if (e.patch == "forearm_R") CHECK(e.phase == ContactPhase::ongoing);
}

TEST_CASE("base ring touching a wheelchair gives a base contact") {
  Scene s = test::scene("empty");
  s.objects.push_back(make_box("wheelchair", {0.2, 0.6, 0.5}, {0.34 + 0.1 - 0.01, 0.0, 0.25}));
  World w(robot_ptr(), s);
  const auto events = w.detect_contacts();
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == PatchKind::base);
  CHECK(events[0].patch == "base_ring");
  CHECK(events[0].object == "wheelchair");
  CHECK(events[0].world.head<2>().norm() == doctest::Approx(0.34).epsilon(1e-9));
  CHECK(events[0].world.z() >= 0.05 - 1e-9);
  CHECK(events[0].world.z() <= 0.30 + 1e-9);
}

TEST_CASE("no overlap, no events") {
  World w(robot_ptr(), test::scene("selfcare"));
  CHECK(w.detect_contacts().empty());
}

TEST_CASE("contact onsets and releases pair up along a sweep") {
  World probe = empty_world();
  Scene s = test::scene("empty");
  const Eigen::Vector3d forearm = probe.host_frame(SkinHost::forearm_right) * Eigen::Vector3d(0.16, 0, 0);
  s.objects.push_back(make_box("post", {0.06, 0.06, 1.5}, {forearm.x(), forearm.y(), 0.75}));
  s.objects.push_back(make_box("crate", {0.3, 0.3, 0.3}, {0.0, 0.52, 0.15}));
  World w(robot_ptr(), s);
  std::map<std::pair<std::string, std::string>, int> open;
  int onsets = 0, releases = 0;
  std::mt19937_64 rng(4);
  for (int k = 0; k < 16; ++k) {
    ArmAngles t = robot().arm(Side::right).nominal;
    t[0] += std::uniform_real_distribution<double>(-0.4, 0.4)(rng);
    w.set_arm_target(Side::right, t);
    w.set_base_velocity({0.0, k % 2 ? 0.1 : -0.1, 0.0});
    for (int i = 0; i < 40; ++i) {
      w.step(kTick);
      for (const auto& e : w.detect_contacts()) {
        auto& n = open[{e.patch, e.object}];
        if (e.phase == ContactPhase::onset) {
          CHECK(n++ == 0);
          ++onsets;
        } else if (e.phase == ContactPhase::ongoing) {
          CHECK(n == 1);
        } else {
          CHECK(n-- == 1);
          ++releases;
        }
      }
    }
  }
  CHECK(onsets > 4);
  CHECK(releases >= onsets - 2);
}

TEST_CASE("grasp outcomes") {
  SUBCASE("5 cm block between the pads") {
    World w = world_with_block(0.05, 0.09);
    const GraspResult r = w.attempt_grasp(Side::right);
    CHECK(r.outcome == GraspOutcome::grasped);
    CHECK(r.object == "block");
    CHECK(std::abs(w.joints().gripper(Side::right) - 0.05) <= 0.002);
    CHECK(w.held(Side::right));
  }
  SUBCASE("empty air") {
    Scene s = test::scene("empty");
    s.start.q.gripper(Side::right) = 0.06;
    World w(robot_ptr(), s);
    const GraspResult r = w.attempt_grasp(Side::right);
    CHECK(r.outcome == GraspOutcome::no_object);
    CHECK(w.joints().gripper(Side::right) == robot().gripper.aperture_min);
  }
  SUBCASE("10 cm block is too wide") {
    World w = world_with_block(0.10, 0.09);
    CHECK(w.attempt_grasp(Side::right).outcome == GraspOutcome::too_wide);
    CHECK_FALSE(w.held(Side::right));
  }
  SUBCASE("probe is pure") {
    World w = world_with_block(0.05, 0.09);
    const World before = w;
    CHECK(w.probe_grasp(Side::right).outcome == GraspOutcome::grasped);
    CHECK(w.joints() == before.joints());
    CHECK_FALSE(w.held(Side::right));
  }
}

TEST_CASE("grasped objects follow the gripper rigidly") {
  World w = world_with_block(0.05, 0.09);
  REQUIRE(w.attempt_grasp(Side::right).outcome == GraspOutcome::grasped);
  const Eigen::Isometry3d grasp = w.held(Side::right)->grasp;
  ArmAngles t = w.joints().arm(Side::right);
  t[0] -= 0.4;
  t[5] -= 0.3;
  w.set_arm_target(Side::right, t);
  w.set_base_velocity({0.1, 0.05, 0.2});
  for (int i = 0; i < 60; ++i) {
    w.step(kTick);
    const Pose expected = Pose::from_isometry(w.gripper_pose(Side::right).isometry() * grasp);
    const Pose& got = w.object("block")->pose;
    CHECK(got.position == expected.position);
    CHECK(got.orientation.coeffs() == expected.orientation.coeffs());
  }
}

TEST_CASE("release settles onto the support below") {
  SUBCASE("block over a table rests on the table top") {
    Scene s = test::scene("empty");
    World probe(robot_ptr(), s);
    const Eigen::Vector3d tip = probe.fingertip(Side::right);
    s.objects.push_back(make_box("table", {0.6, 1.0, 0.04}, {tip.x(), tip.y(), 0.5}));
    s.objects.push_back(make_box("block", Eigen::Vector3d::Constant(0.05), tip, MassClass::liftable));
    s.start.q.gripper(Side::right) = 0.09;
    World w(robot_ptr(), s);
    REQUIRE(w.attempt_grasp(Side::right).outcome == GraspOutcome::grasped);
    w.release(Side::right);
    const WorldObject* b = w.object("block");
    CHECK(b->pose.position.z() == doctest::Approx(0.52 + 0.025).epsilon(1e-12));
    CHECK(b->pose.position.x() == doctest::Approx(tip.x()));
    CHECK(angular_distance(b->pose.orientation, Eigen::Quaterniond::Identity()) < 1e-9);
  }
  SUBCASE("nothing held is a no-op") {
    World w(robot_ptr(), test::scene("selfcare"));
    const World before = w;
    w.release(Side::left);
    CHECK(w.object("bottle")->pose.position == before.object("bottle")->pose.position);
  }
  SUBCASE("tilted bottle released over the floor stands upright at the same x, y") {
    Scene s = test::scene("selfcare");
    World probe(robot_ptr(), s);
    WorldObject bottle = *s.find("bottle");
    bottle.pose.position = probe.fingertip(Side::right);
    bottle.pose.orientation = Eigen::AngleAxisd(0.7, Eigen::Vector3d::UnitX()) * Eigen::AngleAxisd(0.4, Eigen::Vector3d::UnitZ());
    s.objects = {bottle};
    s.start.q.gripper(Side::right) = 0.09;
    World w(robot_ptr(), s);
    REQUIRE(w.attempt_grasp(Side::right).outcome == GraspOutcome::grasped);
    const Eigen::Vector3d held = w.object("bottle")->pose.position;
    w.release(Side::right);
    const WorldObject* b = w.object("bottle");
    // oracle: straight down from the centre to the floor, bottom face 0.10 m below the centre
    CHECK(b->pose.position.x() == doctest::Approx(held.x()));
    CHECK(b->pose.position.y() == doctest::Approx(held.y()));
    CHECK(b->pose.position.z() == doctest::Approx(0.10).epsilon(1e-12));
    const Eigen::Vector3d up = b->pose.orientation * Eigen::Vector3d::UnitZ();
    CHECK((up - Eigen::Vector3d::UnitZ()).norm() < 1e-12);
  }
}

TEST_CASE("depth sampling") {
  Scene s = test::scene("empty");
  s.start.q.head_tilt = 0.6;
  World probe(robot_ptr(), s);
  const Pose cam = probe.depth_camera();
  const Eigen::Vector3d fwd = cam.orientation * Eigen::Vector3d::UnitX();
  // a box whose near face is perpendicular to the view direction, 1.2 m away
  Eigen::Vector3d face_centre = cam.position + 1.2 * fwd;
  WorldObject box = make_box("box", {0.4, 0.8, 0.8}, face_centre + 0.2 * fwd);
  const double yaw = std::atan2(fwd.y(), fwd.x());
  const double pitch = std::asin(-fwd.z());
  box.pose.orientation = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY());
  s.objects.push_back(box);
  World w(robot_ptr(), s);

  SUBCASE("empty region") {
    CHECK(w.sample_depth_region(cam.position + Eigen::Vector3d(0, 0, 3.0), 0.1, 2).empty());
    CHECK(w.sample_depth_region(face_centre, 0.0, 2).empty());
  }
  SUBCASE("points lie on the box face") {
    const auto pts = w.sample_depth_region(face_centre, 0.15, 2);
    REQUIRE(pts.size() > 50);
    const Eigen::Vector3d normal = -(box.pose.orientation * Eigen::Vector3d::UnitX());
    for (const auto& p : pts) {
      CHECK(std::abs((p.position - face_centre).dot(normal)) < 1e-9);
      CHECK((p.position - face_centre).norm() <= 0.15 + 1e-12);
    }
  }
  SUBCASE("doubling the stride quarters the count") {
    const std::size_t n1 = w.sample_depth_region(face_centre, 0.2, 2).size();
    const std::size_t n2 = w.sample_depth_region(face_centre, 0.2, 4).size();
    const double rows = std::sqrt(double(n2));
    CHECK(std::abs(double(n1) - 4.0 * n2) <= 4.0 * (2 * rows + 1));
  }
}

TEST_CASE("battery drains monotonically and recovers only while charging") {
  WorldOptions opt;
  opt.battery_hours = 0.01;  // 36 s
  World w(robot_ptr(), test::scene("empty"), opt);
  double prev = w.diagnostics().battery;
  for (int i = 0; i < 2500; ++i) {
    w.step(kTick);
    CHECK(w.diagnostics().battery <= prev);
    prev = w.diagnostics().battery;
  }
  CHECK(prev == 0.0);
  w.set_charging(true);
  w.step(Micros(3'600'000));
  CHECK(w.diagnostics().battery == doctest::Approx(0.1));
}

TEST_CASE("per-step displacement stays below half the smallest object dimension") {
  // Fastest robot surface points: base rim at the linear cap plus the yaw cap
  // times the farthest reachable radius; arm tips at the Cartesian cap.
  const double dt = 0.02;
  const double reach = robot().arm(Side::left).reach() + 0.3;
  for (const char* name : {"selfcare", "arat"}) {
    const Scene s = test::scene(name);
    double smallest = 1e9;
    auto consider = [&](const WorldObject& o) { smallest = std::min(smallest, o.local_bounds().sizes().minCoeff()); };
    for (const auto& o : s.objects) consider(o);
    for (const auto& it : s.items)
      for (const auto& o : it.objects) consider(o);
    const double arm = 0.08 * dt;
    CHECK(arm < 0.5 * smallest);
    if (std::string(name) == "selfcare") {
      const double base = (robot().base.max_linear_velocity + robot().base.max_angular_velocity * reach) * dt;
      CHECK(base < 0.5 * smallest);
    }
  }
}

TEST_CASE("offline render sees the scene") {
  World w(robot_ptr(), test::scene("selfcare"));
  const CameraModel cam = rescaled(robot().camera, 96, 54);
  const Image img = render_view(w.objects(), cam, w.camera());
  CHECK(img.width == 96);
  CHECK(img.rgb.size() == 96u * 54u * 3u);
  const auto pr = project_to_pixel(cam, w.camera(), w.object("bottle")->pose.position);
  REQUIRE(pr.on_screen);
  const int u = static_cast<int>(pr.pixel.x()), v = static_cast<int>(pr.pixel.y());
  const std::uint8_t* px = &img.rgb[3u * (v * 96 + u)];
  CHECK(px[2] > px[0]);  // bottle is blue
}

}  // TEST_SUITE
