#include <doctest.h>

#include <chrono>
#include <random>

#include "fk_oracle.hpp"
#include "surrogate/kinematics/kinematics.hpp"
#include "test_support.hpp"

using namespace surrogate;
using surrogate::test::robot;

namespace {

constexpr double kPi = std::numbers::pi;

ArmAngles random_angles(const ArmModel& arm, std::mt19937_64& rng) {
  ArmAngles q;
  for (int i = 0; i < kArmJoints; ++i) {
    const Joint& j = arm.joints[i];
    std::uniform_real_distribution<double> d(j.continuous ? -kPi : j.lower, j.continuous ? kPi : j.upper);
    q[i] = d(rng);
  }
  return q;
}

JointVector random_joints(std::mt19937_64& rng) {
  JointVector q;
  for (Side s : {Side::left, Side::right}) q.arm(s) = random_angles(robot().arm(s), rng);
  q.torso_lift = std::uniform_real_distribution<double>(0.0, robot().torso.travel)(rng);
  return q;
}

const nlohmann::json& robot_json() {
  static const auto j = test::read_json(test::config_dir() / "robot.json");
  return j;
}

std::array<double, 7> raw(const ArmAngles& q) {
  std::array<double, 7> out;
  for (int i = 0; i < 7; ++i) out[i] = q[i];
  return out;
}

}  // namespace

TEST_SUITE("kinematics") {

TEST_CASE("zero joints give the chain of fixed offsets") {
  JointVector q;
  q.arm(Side::left)[1] = 0.0;
  for (Side s : {Side::left, Side::right}) {
    const Pose p = forward_kinematics(robot().arm(s), q, s);
    const double y = s == Side::left ? 0.188 : -0.188;
    CHECK(p.position.x() == doctest::Approx(-0.05 + 0.1 + 0.40 + 0.32 + 0.18).epsilon(1e-12));
    CHECK(p.position.y() == doctest::Approx(y).epsilon(1e-12));
    CHECK(p.position.z() == doctest::Approx(0.80).epsilon(1e-12));
    CHECK(p.orientation.angularDistance(Eigen::Quaterniond::Identity()) < 1e-12);
  }
  q.torso_lift = 0.2;
  CHECK(forward_kinematics(robot().arm(Side::left), q, Side::left).position.z() == doctest::Approx(1.0));
}

TEST_CASE("shoulder pan rotates the gripper about the vertical shoulder axis") {
  const ArmModel& arm = robot().arm(Side::left);
  JointVector q;
  const Eigen::Vector3d axis_point(-0.05, 0.188, 0.8);
  const Eigen::Vector3d p0 = forward_kinematics(arm, q, Side::left).position - axis_point;
  for (double d : {0.3, 1.0, -0.5}) {
    q.arm(Side::left)[0] = d;
    const Eigen::Vector3d p = forward_kinematics(arm, q, Side::left).position - axis_point;
    CHECK(p.head<2>().norm() == doctest::Approx(p0.head<2>().norm()).epsilon(1e-12));
    CHECK(p.z() == doctest::Approx(p0.z()).epsilon(1e-12));
    CHECK(normalize_angle(std::atan2(p.y(), p.x()) - std::atan2(p0.y(), p0.x())) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("forward kinematics matches the matrix-chain oracle") {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 1000; ++n) {
    const JointVector q = random_joints(rng);
    for (Side s : {Side::left, Side::right}) {
      const Pose p = forward_kinematics(robot().arm(s), q, s);
      const auto M = test::oracle_gripper(robot_json(), std::string(to_string(s)), raw(q.arm(s)), q.torso_lift);
      Eigen::Matrix3d R;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) R(i, j) = M[i][j];
      for (int i = 0; i < 3; ++i) CHECK(std::abs(p.position[i] - M[i][3]) < 1e-9);
      CHECK(p.orientation.angularDistance(Eigen::Quaterniond(R)) < 1e-9);
      CHECK(std::abs(p.orientation.norm() - 1.0) < 1e-9);

      const Eigen::Vector3d tip = fingertip_point(robot().arm(s), q, s);
      const auto t = test::apply(M, robot().arm(s).fingertip_offset, 0, 0);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(tip[i] - t[i]) < 1e-9);
    }
  }
}

TEST_CASE("forward kinematics is deterministic") {
  std::mt19937_64 rng(3);
  const JointVector q = random_joints(rng);
  const Pose a = forward_kinematics(robot().arm(Side::right), q, Side::right);
  const Pose b = forward_kinematics(robot().arm(Side::right), q, Side::right);
  CHECK(a.position == b.position);
  CHECK(a.orientation.coeffs() == b.orientation.coeffs());
}

TEST_CASE("out-of-limit joints are rejected") {
  JointVector q;
  q.arm(Side::left)[3] = 0.5;  // elbow flex upper limit is 0
  CHECK_THROWS_AS(forward_kinematics(robot().arm(Side::left), q, Side::left), KinematicsError);
  CHECK_THROWS_AS(solve_ik_step(robot().arm(Side::left), q, Side::left, Pose{}), KinematicsError);
}

TEST_CASE("fingertip is the gripper position advanced along the approach axis") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 50; ++n) {
    JointVector q = random_joints(rng);
    const ArmModel& arm = robot().arm(Side::left);
    const Pose g = forward_kinematics(arm, q, Side::left);
    const Eigen::Vector3d tip = fingertip_point(arm, q, Side::left);
    CHECK((tip - (g.position + arm.fingertip_offset * (g.orientation * Eigen::Vector3d::UnitX()))).norm() < 1e-12);
    q.arm(Side::left)[6] = normalize_angle(q.arm(Side::left)[6] + 1.3);
    CHECK((fingertip_point(arm, q, Side::left) - tip).norm() < 1e-12);
  }
}

TEST_CASE("jacobian matches finite differences") {
  std::mt19937_64 rng(9);
  const ArmModel& arm = robot().arm(Side::right);
  const ArmAngles q = random_angles(arm, rng);
  const auto J = arm_jacobian(arm, q, 0.1);
  const auto T0 = arm_link_frames(arm, q, 0.1).back();
  const double h = 1e-7;
  for (int i = 0; i < kArmJoints; ++i) {
    ArmAngles qh = q;
    qh[i] += h;
    const auto T1 = arm_link_frames(arm, qh, 0.1).back();
    const Eigen::Vector3d dp = (T1.translation() - T0.translation()) / h;
    const Eigen::Vector3d dr =
        rotation_error(Eigen::Quaterniond(T1.linear()), Eigen::Quaterniond(T0.linear())) / h;
    CHECK((dp - J.block<3, 1>(0, i)).norm() < 1e-5);
    CHECK((dr - J.block<3, 1>(3, i)).norm() < 1e-5);
  }
}

TEST_CASE("ik returns q_current for a goal it already satisfies") {
  std::mt19937_64 rng(21);
  const JointVector q = random_joints(rng);
  const ArmModel& arm = robot().arm(Side::left);
  const IkResult r = solve_ik_step(arm, q, Side::left, forward_kinematics(arm, q, Side::left));
  REQUIRE(r.ok());
  CHECK((r.q.arm(Side::left) - q.arm(Side::left)).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(r.q == q);
}

TEST_CASE("ik reports goals far beyond reach as unreachable") {
  const ArmModel& arm = robot().arm(Side::right);
  JointVector q;
  q.arm(Side::right) = arm.nominal;
  const Eigen::Vector3d shoulder(-0.05, -0.188, 0.8);
  Pose goal;
  goal.position = shoulder + Eigen::Vector3d(2.0 * arm.reach(), 0.0, 0.0);
  const IkResult r = solve_ik_step(arm, q, Side::right, goal);
  CHECK_FALSE(r.ok());
  CHECK(r.status == IkStatus::unreachable);
  CHECK(r.q == q);
}

TEST_CASE("ik round trip over random reachable goals") {
  std::mt19937_64 rng(1234);
  IkOptions opt;
  for (Side s : {Side::left, Side::right}) {
    const ArmModel& arm = robot().arm(s);
    int failures = 0;
    for (int n = 0; n < 200; ++n) {
      JointVector start;
      start.torso_lift = 0.1;
      start.arm(s) = arm.nominal;
      JointVector target = start;
      target.arm(s) = random_angles(arm, rng);
      const Pose goal = forward_kinematics(arm, target, s);
      const IkResult r = solve_ik_step(arm, start, s, goal, opt);
      if (!r.ok()) {
        ++failures;
        continue;
      }
      CHECK(arm.within_limits(r.q.arm(s)));
      CHECK(r.q.arm(other(s)) == start.arm(other(s)));
      const Pose got = forward_kinematics(arm, r.q, s);
      // checked against the independent chain, not the solver's own error
      const auto M = test::oracle_gripper(robot_json(), std::string(to_string(s)), raw(r.q.arm(s)), r.q.torso_lift);
      Eigen::Matrix3d R;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) R(i, j) = M[i][j];
      CHECK((Eigen::Vector3d(M[0][3], M[1][3], M[2][3]) - goal.position).norm() <= opt.position_tolerance);
      CHECK(Eigen::Quaterniond(R).angularDistance(goal.orientation) <= opt.orientation_tolerance);
      CHECK((got.position - goal.position).norm() <= opt.position_tolerance);
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("head look-at geometry") {
  const auto& d = robot();
  JointVector q;
  q.torso_lift = 0.1;
  const Eigen::Vector3d cam = camera_in_base(d.head, d.camera, q).translation();

  PanTilt a = head_look_at(d.head, d.camera, q, cam + Eigen::Vector3d(2.0, 0, 0));
  CHECK(std::abs(a.pan) < 1e-12);
  CHECK(std::abs(a.tilt) < 1e-12);
  CHECK_FALSE(a.clamped);

  PanTilt b = head_look_at(d.head, d.camera, q, cam + Eigen::Vector3d(0, 1.5, 0));
  CHECK(b.pan == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(std::abs(b.tilt) < 1e-12);

  PanTilt below = head_look_at(d.head, d.camera, q, cam + Eigen::Vector3d(1.0, 0, -1.0));
  CHECK(below.tilt == doctest::Approx(kPi / 4).epsilon(1e-12));

  PanTilt behind = head_look_at(d.head, d.camera, q, cam + Eigen::Vector3d(-1.0, -0.01, 0));
  CHECK(behind.clamped);
  CHECK(behind.pan == doctest::Approx(-2.7));

  CHECK_THROWS_AS(head_look_at(d.head, d.camera, q, cam), KinematicsError);
}

TEST_CASE("look-at reprojects to the image centre and is idempotent") {
  const auto& d = robot();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ux(0.3, 3.0), uy(-2.0, 2.0), uz(0.0, 1.8);
  int unclamped = 0;
  for (int n = 0; n < 500; ++n) {
    JointVector q;
    q.torso_lift = std::uniform_real_distribution<double>(0, 0.3)(rng);
    const Eigen::Vector3d target(ux(rng), uy(rng), uz(rng));
    const PanTilt pt = head_look_at(d.head, d.camera, q, target);
    q.head_pan = pt.pan;
    q.head_tilt = pt.tilt;
    const PanTilt again = head_look_at(d.head, d.camera, q, target);
    CHECK(std::abs(again.pan - pt.pan) < 1e-9);
    CHECK(std::abs(again.tilt - pt.tilt) < 1e-9);
    if (pt.clamped) continue;
    ++unclamped;
    const Projection pr = project_to_pixel(d.camera, Pose::from_isometry(camera_in_base(d.head, d.camera, q)), target);
    REQUIRE(pr.on_screen);
    CHECK((pr.pixel - Eigen::Vector2d(d.camera.cx, d.camera.cy)).norm() < 0.5);
  }
  CHECK(unclamped > 400);
}

TEST_CASE("projection matches the pinhole oracle") {
  const auto& d = robot();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ang(-0.6, 0.6), u(0.0, 1.0);
  for (int n = 0; n < 500; ++n) {
    JointVector q;
    q.head_pan = ang(rng);
    q.head_tilt = ang(rng);
    const BasePose base{u(rng), u(rng), ang(rng)};
    const Pose cam = camera_pose(d, base, q);
    // random pixel and depth, lifted to 3D via the oracle's own inverse
    const double px = u(rng) * d.camera.width, py = u(rng) * d.camera.height, depth = 0.5 + 3.0 * u(rng);
    const Eigen::Vector3d local(depth, -(px - d.camera.cx) / d.camera.fx * depth, -(py - d.camera.cy) / d.camera.fy * depth);
    const Eigen::Vector3d world = cam * local;

    test::Mat4 M = test::identity4();
    const Eigen::Matrix3d R = cam.orientation.toRotationMatrix();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) M[i][j] = R(i, j);
      M[i][3] = cam.position[i];
    }
    const auto o = test::oracle_pixel(M, d.camera.fx, d.camera.fy, d.camera.cx, d.camera.cy,
                                      {world.x(), world.y(), world.z()});
    const Projection p = project_to_pixel(d.camera, cam, world);
    REQUIRE(p.on_screen);
    CHECK(std::abs(p.pixel.x() - o[0]) < 1e-6);
    CHECK(std::abs(p.pixel.y() - o[1]) < 1e-6);
  }
}

TEST_CASE("optical axis projects to the principal point; off-screen points give edges") {
  const auto& d = robot();
  const Pose cam;
  const Projection c = project_to_pixel(d.camera, cam, Eigen::Vector3d(3, 0, 0));
  REQUIRE(c.on_screen);
  CHECK(c.pixel.x() == doctest::Approx(d.camera.cx));
  CHECK(c.pixel.y() == doctest::Approx(d.camera.cy));

  CHECK(project_to_pixel(d.camera, cam, Eigen::Vector3d(-1, 0.5, 0)).edge == ScreenEdge::left);
  CHECK(project_to_pixel(d.camera, cam, Eigen::Vector3d(-1, -0.5, 0)).edge == ScreenEdge::right);
  CHECK(project_to_pixel(d.camera, cam, Eigen::Vector3d(-1, 0, 0.5)).edge == ScreenEdge::top);
  CHECK(project_to_pixel(d.camera, cam, Eigen::Vector3d(1, 5, 0)).edge == ScreenEdge::left);
  CHECK(project_to_pixel(d.camera, cam, Eigen::Vector3d(1, 0, -5)).edge == ScreenEdge::bottom);
  CHECK(project_to_pixel(d.camera, cam, Eigen::Vector3d(1, 5, 5)).edge == ScreenEdge::top_left);
  CHECK(project_to_pixel(d.camera, cam, Eigen::Vector3d(1, -5, -5)).edge == ScreenEdge::bottom_right);
  CHECK_FALSE(project_to_pixel(d.camera, cam, Eigen::Vector3d(-1, 0.5, 0)).on_screen);
}

TEST_CASE("pixel to ground") {
  const auto& d = robot();
  const Eigen::Vector2d centre(d.camera.cx, d.camera.cy);
  Pose down;
  down.position = {0.4, -0.2, 1.5};
  down.orientation = Eigen::AngleAxisd(kPi / 2, Eigen::Vector3d::UnitY());  // x axis points to -z
  const auto hit = pixel_to_ground(d.camera, down, centre);
  REQUIRE(hit);
  CHECK((*hit - Eigen::Vector3d(0.4, -0.2, 0.0)).norm() < 1e-12);

  Pose level;
  level.position = {0, 0, 1.3};
  CHECK_FALSE(pixel_to_ground(d.camera, level, centre));
  // upper half of the image looks at the sky
  CHECK_FALSE(pixel_to_ground(d.camera, level, Eigen::Vector2d(100, 10)));
  CHECK_THROWS_AS(pixel_to_ground(d.camera, level, Eigen::Vector2d(-1, 10)), KinematicsError);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> tilt(0.3, 1.3), u(0.0, 1.0);
  int hits = 0;
  for (int n = 0; n < 500; ++n) {
    JointVector q;
    q.head_tilt = tilt(rng);
    q.head_pan = u(rng) - 0.5;
    q.torso_lift = 0.3 * u(rng);
    const Pose cam = camera_pose(d, BasePose{u(rng), u(rng), 2 * u(rng) - 1}, q);
    const Eigen::Vector2d px(u(rng) * d.camera.width, u(rng) * d.camera.height);
    const auto g = pixel_to_ground(d.camera, cam, px);
    if (!g) continue;
    ++hits;
    CHECK(std::abs(g->z()) < 1e-9);
    const Ray ray = pixel_ray(d.camera, cam, px);
    const double t = (*g - ray.origin).dot(ray.direction);
    CHECK((ray.at(t) - *g).norm() < 1e-9);
    CHECK(t > 0.0);
    const Projection back = project_to_pixel(d.camera, cam, *g);
    REQUIRE(back.on_screen);
    CHECK((back.pixel - px).norm() < 0.5);
  }
  CHECK(hits > 300);
}

TEST_CASE("robot description errors name the field") {
  auto doc = test::read_json(test::config_dir() / "robot.json");
  doc["arms"]["left"]["joints"].erase(0);
  try {
    parse_robot_description(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "/arms/left/joints");
  }
  auto bad = test::read_json(test::config_dir() / "robot.json");
  bad["skin"][4]["kind"] = "arm";
  CHECK_THROWS_AS(parse_robot_description(bad), ConfigError);
  auto cam = test::read_json(test::config_dir() / "robot.json");
  cam["cameras"]["rgb"]["cx"] = 5000;
  CHECK_THROWS_AS(parse_robot_description(cam), ConfigError);
}

TEST_CASE("base pose and angle helpers") {
  CHECK(normalize_angle(kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(-kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  const BasePose b{1.0, 2.0, kPi / 2};
  const Eigen::Vector2d w = b.to_world({1.0, 0.0});
  CHECK(w.x() == doctest::Approx(0.0));
  CHECK(w.y() == doctest::Approx(1.0));
  CHECK((b.isometry() * Eigen::Vector3d(1, 0, 0) - Eigen::Vector3d(1, 3, 0)).norm() < 1e-12);
}

}  // TEST_SUITE
