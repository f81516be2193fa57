#include "surrogate/assess/experts.hpp"

#include <cmath>
#include <numbers>

namespace surrogate {

namespace {

const WorldObject& require_object(const World& w, const std::string& id) {
  const WorldObject* o = w.object(id);
  if (!o) throw AgentFailure("no object '" + id + "' in the scene");
  return *o;
}

Eigen::Vector3d require_anchor(const World& w, const std::string& name) {
  const auto a = w.anchor(name);
  if (!a) throw AgentFailure("no anchor '" + name + "' in the scene");
  return *a;
}

Eigen::Vector2d planar(double heading, double x, double y) { return Eigen::Rotation2Dd(heading) * Eigen::Vector2d(x, y); }

void ensure(bool ok, const std::string& what) {
  if (!ok) throw AgentFailure(what);
}

// Fingertip above, then down onto the object's center, and close.
void pick(Agent& a, Side side, const std::string& id, double clearance) {
  const Eigen::Vector3d c = require_object(a.world(), id).pose.position;
  const double top = require_object(a.world(), id).bounds().max().z();
  a.open_gripper(side, 1.0);
  ensure(a.hand_vertical(side, top + clearance), "cannot rise above " + id);
  ensure(a.hand_horizontal(side, c.head<2>()), "cannot reach over " + id);
  ensure(a.hand_vertical(side, c.z()), "cannot descend onto " + id);
  const std::string outcome = a.grasp(side);
  if (outcome != "grasped") throw AgentFailure("grasp " + id + ": " + outcome);
}

// Fingertip position that puts the held object's point `object_point` at `where`.
Eigen::Vector3d tip_for(const World& w, Side side, const Eigen::Vector3d& object_point, const Eigen::Vector3d& where) {
  return where - (object_point - w.fingertip(side));
}

void place(Agent& a, const AratItem& item, Side side) {
  const World& w = a.world();
  const Eigen::Vector3d target = require_anchor(w, "target");
  pick(a, side, item.object, 0.08);
  const WorldObject& o = require_object(w, item.object);
  const double below = o.pose.position.z() - o.bounds().min().z();  // center above its lowest point
  const double carry = std::max(o.bounds().min().z(), target.z()) + below + 0.06;  // object center while carried
  ensure(a.hand_vertical(side, w.fingertip(side).z() + carry - o.pose.position.z()), "cannot lift");
  const Eigen::Vector3d release(target.x(), target.y(), target.z() + below + 0.01);
  const Eigen::Vector3d tip = tip_for(w, side, o.pose.position, release);
  ensure(a.hand_horizontal(side, tip.head<2>()), "cannot carry to the target");
  ensure(a.hand_vertical(side, tip.z()), "cannot lower onto the target");
  a.open_gripper(side, 1.0);
  a.hand_vertical(side, w.fingertip(side).z() + 0.05);
}

// Predicted object tilt after rotating the gripper by `arrow` about the fingertip.
double predicted_tilt(const World& w, Side side, const WorldObject& o, RotateArrow arrow, StepSize size) {
  const Eigen::Matrix3d g = w.gripper_pose(side).orientation.toRotationMatrix();
  const Eigen::Matrix3d r = g * Eigen::AngleAxisd(rotation_step(size), arrow_axis(arrow)).toRotationMatrix() * g.transpose();
  return tilt(Pose(o.pose.position, Eigen::Quaterniond(r * o.pose.orientation.toRotationMatrix())));
}

void pour(Agent& a, const AratItem& item, Side side) {
  const World& w = a.world();
  const Eigen::Vector3d target = require_anchor(w, "target");
  pick(a, side, item.object, 0.08);
  const WorldObject& o = require_object(w, item.object);
  const Eigen::Vector3d over(target.x(), target.y(), target.z() + 0.12);
  const Eigen::Vector3d tip = tip_for(w, side, o.pose.position, over);
  ensure(a.hand_vertical(side, tip.z()), "cannot lift the glass");
  ensure(a.hand_horizontal(side, tip.head<2>()), "cannot carry the glass");

  // Greedy tipping: the reachable rotation step that tilts the glass the most.
  const std::vector<RotateArrow> arrows{RotateArrow::roll_pos, RotateArrow::roll_neg, RotateArrow::pitch_pos,
                                        RotateArrow::pitch_neg, RotateArrow::yaw_pos, RotateArrow::yaw_neg};
  for (int moves = 0; moves < 12 && tilt(o.pose) < std::numbers::pi / 2 + 0.05; ++moves) {
    std::vector<std::tuple<double, RotateArrow, StepSize>> options;
    for (RotateArrow arrow : arrows)
      for (StepSize size : {StepSize::L, StepSize::M, StepSize::S, StepSize::XS})
        options.emplace_back(predicted_tilt(w, side, o, arrow, size), arrow, size);
    std::sort(options.begin(), options.end(), [](const auto& x, const auto& y) { return std::get<0>(x) > std::get<0>(y); });
    bool turned = false;
    for (const auto& [t, arrow, size] : options) {
      if (t <= tilt(o.pose) + 1e-3) break;
      if ((turned = a.rotate(side, arrow, size))) break;
    }
    ensure(turned, "cannot tip the glass further");
  }
  ensure(tilt(o.pose) >= std::numbers::pi / 2, "glass not tipped");
}

void gross(Agent& a, Side side) {
  const Eigen::Vector3d target = require_anchor(a.world(), "target");
  ensure(a.hand_to(side, target, true), "cannot reach the target");
}

}  // namespace

void selfcare_expert(Agent& a, Side side) {
  const World& w = a.world();
  const WorldObject& bottle = require_object(w, "bottle");
  const Eigen::Vector3d mouth = require_anchor(w, "mouth_center");
  const double lateral = side == Side::right ? -0.15 : 0.15;  // bottle/mouth offset in the base frame

  // Hand in front of the body at bottle height, then up to the shelf.
  const double h0 = w.base().heading;
  const Eigen::Vector3d c = bottle.pose.position;
  const Eigen::Vector2d base0(w.base().x, w.base().y);
  ensure(a.hand_vertical(side, c.z()), "cannot set the hand height");
  ensure(a.hand_horizontal(side, base0 + planar(h0, 0.60, lateral)), "cannot bring the hand in");
  a.open_gripper(side, 1.0);
  a.drive_to(c.head<2>() - planar(h0, 0.70, lateral));

  ensure(a.hand_horizontal(side, c.head<2>()), "cannot reach the bottle");
  ensure(a.hand_vertical(side, c.z()), "cannot align with the bottle");
  const std::string outcome = a.grasp(side);
  if (outcome != "grasped") throw AgentFailure("bottle grasp: " + outcome);
  const double travel = w.robot().torso.travel;
  const auto raise = [&](double dz) { a.spine(std::clamp(w.joints().torso_lift + dz, 0.0, travel) / travel); };
  raise(0.03);
  const double h = w.base().heading;
  ensure(a.hand_horizontal(side, w.fingertip(side).head<2>() - planar(h, 0.12, 0.0)), "cannot pull the bottle out");

  const Eigen::Vector2d to_mouth = mouth.head<2>() - Eigen::Vector2d(w.base().x, w.base().y);
  a.turn_to(std::atan2(to_mouth.y(), to_mouth.x()));

  // Stand where the straw tip target lies at the grasp reach.
  const auto straw = [&] { return *require_object(w, "bottle").attachment_world(); };
  Eigen::Vector3d tip = tip_for(w, side, straw(), mouth);
  const double heading = w.base().heading;
  a.drive_to(tip.head<2>() - planar(heading, 0.62, lateral));
  raise(tip.z() - w.fingertip(side).z());  // the spine is continuous, steps are not
  for (int pass = 0; pass < 3; ++pass) {
    tip = tip_for(w, side, straw(), mouth);
    ensure(a.hand_to(side, tip, true), "cannot bring the straw to the mouth");
    if ((straw() - mouth).norm() < 0.005) break;
  }
}

void arat_expert(Agent& a, const AratItem& item, Side side) {
  switch (item.task) {
    case AratTask::place: place(a, item, side); break;
    case AratTask::pour: pour(a, item, side); break;
    case AratTask::gross: gross(a, side); break;
  }
}

AgentOptions mid_skill_options(std::uint64_t seed) {
  AgentOptions o;
  o.click_noise_px = 12.0;
  o.think_time = 1.2;
  o.seed = seed;
  return o;
}

}  // namespace surrogate
