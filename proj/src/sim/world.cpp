#include "surrogate/sim/world.hpp"

#include <algorithm>
#include <cmath>

namespace surrogate {

std::string_view to_string(ContactPhase p) {
  switch (p) {
    case ContactPhase::onset: return "onset";
    case ContactPhase::ongoing: return "ongoing";
    case ContactPhase::released: return "released";
  }
  return "onset";
}

std::string_view to_string(GraspOutcome g) {
  switch (g) {
    case GraspOutcome::grasped: return "grasped";
    case GraspOutcome::no_object: return "no_object";
    case GraspOutcome::too_wide: return "too_wide";
  }
  return "no_object";
}

namespace {

double seconds(Micros dt) { return std::chrono::duration<double>(dt).count(); }

// Moves `value` toward `target` by at most `max_delta`; returns true on arrival.
bool approach(double& value, double target, double max_delta) {
  const double d = target - value;
  if (std::abs(d) <= max_delta) {
    value = target;
    return true;
  }
  value += std::copysign(max_delta, d);
  return false;
}

bool approach_angle(double& value, double target, double max_delta) {
  const double d = normalize_angle(target - value);
  if (std::abs(d) <= max_delta) {
    value = target;
    return true;
  }
  value = normalize_angle(value + std::copysign(max_delta, d));
  return false;
}

std::optional<Side> host_side(SkinHost h) {
  switch (h) {
    case SkinHost::upper_arm_left:
    case SkinHost::forearm_left: return Side::left;
    case SkinHost::upper_arm_right:
    case SkinHost::forearm_right: return Side::right;
    case SkinHost::base: return std::nullopt;
  }
  return std::nullopt;
}

constexpr int kUpperArmLink = 2;  // frame after upper_arm_roll
constexpr int kForearmLink = 4;   // frame after forearm_roll

}  // namespace

World::World(std::shared_ptr<const RobotDescription> robot, Scene scene, WorldOptions options)
    : robot_(std::move(robot)), options_(options) {
  objects_ = scene.objects;
  q_ = scene.start.q;
  base_ = scene.start.base;
  scene_ = std::make_shared<const Scene>(std::move(scene));
}

const WorldObject* World::object(const std::string& id) const {
  for (const auto& o : objects_)
    if (o.id == id) return &o;
  return nullptr;
}

WorldObject* World::object_mut(const std::string& id) {
  for (auto& o : objects_)
    if (o.id == id) return &o;
  return nullptr;
}

std::optional<Eigen::Vector3d> World::anchor(const std::string& name) const {
  const auto it = scene_->anchors.find(name);
  if (it == scene_->anchors.end()) return std::nullopt;
  return it->second;
}

bool World::set_arm_target(Side s, const ArmAngles& q) {
  if (diag_.run_stop) return false;
  ArmAngles t;
  for (int i = 0; i < kArmJoints; ++i) t[i] = robot_->arm(s).joints[i].clamp(q[i]);
  arm_target_[index(s)] = t;
  return true;
}

bool World::set_torso_target(double lift) {
  if (diag_.run_stop) return false;
  torso_target_ = std::clamp(lift, 0.0, robot_->torso.travel);
  return true;
}

bool World::set_head_target(double pan, double tilt) {
  if (diag_.run_stop) return false;
  const auto& h = robot_->head;
  head_target_ = {std::clamp(pan, h.pan_lower, h.pan_upper), std::clamp(tilt, h.tilt_lower, h.tilt_upper)};
  return true;
}

bool World::set_gripper_target(Side s, double aperture) {
  if (diag_.run_stop) return false;
  aperture_target_[index(s)] = std::clamp(aperture, robot_->gripper.aperture_min, robot_->gripper.aperture_max);
  return true;
}

bool World::set_base_velocity(const Eigen::Vector3d& v) {
  if (diag_.run_stop) return false;
  Eigen::Vector3d c = v;
  const double lin = c.head<2>().norm(), vmax = robot_->base.max_linear_velocity;
  if (lin > vmax) c.head<2>() *= vmax / lin;
  c.z() = std::clamp(c.z(), -robot_->base.max_angular_velocity, robot_->base.max_angular_velocity);
  base_velocity_ = c;
  return true;
}

void World::set_run_stop(bool engaged) {
  diag_.run_stop = engaged;
  if (!engaged) return;
  for (Side s : {Side::left, Side::right}) {
    arm_target_[index(s)].reset();
    aperture_target_[index(s)].reset();
  }
  torso_target_.reset();
  head_target_.reset();
  base_velocity_.setZero();
}

void World::reset_robot(const RobotStart& start) {
  for (Side s : {Side::left, Side::right}) {
    release(s);
    arm_target_[index(s)].reset();
    aperture_target_[index(s)].reset();
  }
  torso_target_.reset();
  head_target_.reset();
  base_velocity_.setZero();
  q_ = start.q;
  base_ = start.base;
}

void World::load_scene(Scene scene) {
  for (Side s : {Side::left, Side::right}) {
    held_[index(s)].reset();
    arm_target_[index(s)].reset();
    aperture_target_[index(s)].reset();
  }
  torso_target_.reset();
  head_target_.reset();
  base_velocity_.setZero();
  active_contacts_.clear();
  objects_ = scene.objects;
  q_ = scene.start.q;
  base_ = scene.start.base;
  scene_ = std::make_shared<const Scene>(std::move(scene));
}

void World::step(Micros dt) {
  const double h = seconds(dt);
  if (h <= 0.0) return;
  diag_.clock += dt;
  const double drain = h / (options_.battery_hours * 3600.0);
  diag_.battery = diag_.charging ? std::min(1.0, diag_.battery + drain) : std::max(0.0, diag_.battery - drain);
  if (diag_.run_stop) return;

  for (Side s : {Side::left, Side::right}) {
    auto& target = arm_target_[index(s)];
    if (!target) continue;
    const ArmModel& arm = robot_->arm(s);
    bool arrived = true;
    for (int i = 0; i < kArmJoints; ++i) {
      const Joint& j = arm.joints[i];
      const double cap = j.max_velocity * h;
      arrived &= j.continuous ? approach_angle(q_.arm(s)[i], (*target)[i], cap) : approach(q_.arm(s)[i], (*target)[i], cap);
    }
    if (arrived) target.reset();
  }
  if (torso_target_ && approach(q_.torso_lift, *torso_target_, robot_->torso.max_velocity * h)) torso_target_.reset();
  if (head_target_) {
    const double cap = robot_->head.max_velocity * h;
    const bool a = approach(q_.head_pan, head_target_->first, cap);
    const bool b = approach(q_.head_tilt, head_target_->second, cap);
    if (a && b) head_target_.reset();
  }
  for (Side s : {Side::left, Side::right}) {
    auto& target = aperture_target_[index(s)];
    if (target && approach(q_.gripper(s), *target, robot_->gripper.max_velocity * h)) target.reset();
  }
  if (!base_velocity_.isZero(0.0)) {
    const double mid = base_.heading + 0.5 * base_velocity_.z() * h;
    const double c = std::cos(mid), sn = std::sin(mid);
    base_.x += (c * base_velocity_.x() - sn * base_velocity_.y()) * h;
    base_.y += (sn * base_velocity_.x() + c * base_velocity_.y()) * h;
    base_.heading = normalize_angle(base_.heading + base_velocity_.z() * h);
  }
  update_attachments();

  if (options_.stop_on_contact) {
    for (const ContactEvent& c : overlaps()) {
      if (c.kind == PatchKind::base) {
        base_velocity_.setZero();
        continue;
      }
      for (const auto& p : robot_->skin)
        if (p.id == c.patch)
          if (auto side = host_side(p.host)) arm_target_[index(*side)].reset();
    }
  }
}

void World::update_attachments() {
  for (Side s : {Side::left, Side::right}) {
    const auto& a = held_[index(s)];
    if (!a) continue;
    if (WorldObject* o = object_mut(a->object)) o->pose = Pose::from_isometry(gripper_pose(s).isometry() * a->grasp);
  }
}

bool World::held_by_any(const std::string& id) const {
  for (const auto& a : held_)
    if (a && a->object == id) return true;
  return false;
}

Pose World::gripper_pose(Side s) const {
  const Eigen::Isometry3d g = arm_link_frames(robot_->arm(s), q_.arm(s), q_.torso_lift).back();
  return Pose::from_isometry(base_.isometry() * g);
}

Eigen::Vector3d World::fingertip(Side s) const {
  return gripper_pose(s) * Eigen::Vector3d(robot_->arm(s).fingertip_offset, 0.0, 0.0);
}

Pose World::camera() const { return camera_pose(*robot_, base_, q_); }

Pose World::depth_camera() const {
  return Pose::from_isometry(base_.isometry() * camera_in_base(robot_->head, robot_->depth_camera, q_));
}

Eigen::Isometry3d World::host_frame(SkinHost host) const {
  const auto side = host_side(host);
  if (!side) return base_.isometry();
  const auto frames = arm_link_frames(robot_->arm(*side), q_.arm(*side), q_.torso_lift);
  const bool upper = host == SkinHost::upper_arm_left || host == SkinHost::upper_arm_right;
  return base_.isometry() * frames[upper ? kUpperArmLink : kForearmLink];
}

std::vector<ContactEvent> World::overlaps() const {
  std::vector<ContactEvent> out;
  for (const SkinPatchSpec& patch : robot_->skin) {
    const Eigen::Isometry3d T = host_frame(patch.host);
    for (const WorldObject& o : objects_) {
      if (held_by_any(o.id)) continue;
      const Eigen::AlignedBox3d box = o.bounds();
      ContactEvent ev;
      ev.patch = patch.id;
      ev.kind = patch.kind;
      ev.object = o.id;
      ev.t = diag_.clock;
      ev.phase = ContactPhase::ongoing;
      if (patch.kind == PatchKind::arm) {
        const Eigen::Vector3d a = T * patch.start, b = T * patch.end;
        Eigen::AlignedBox3d seg(a.cwiseMin(b), a.cwiseMax(b));
        seg.min().array() -= patch.radius;
        seg.max().array() += patch.radius;
        if (!seg.intersects(box)) continue;
        // Deepest point along the axis: coarse scan, then golden-section refinement.
        auto f = [&](double s) { return o.sdf(a + s * (b - a)); };
        constexpr int kSamples = 24;
        int best = 0;
        double best_d = f(0.0);
        for (int i = 1; i <= kSamples; ++i)
          if (const double d = f(double(i) / kSamples); d < best_d) best_d = d, best = i;
        double lo = std::max(0.0, (best - 1.0) / kSamples), hi = std::min(1.0, (best + 1.0) / kSamples);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 40; ++it) {
          const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
          if (f(m1) < f(m2)) hi = m2;
          else lo = m1;
        }
        Eigen::Vector3d pd = a + 0.5 * (lo + hi) * (b - a);
        if (o.sdf(pd) > best_d) pd = a + double(best) / kSamples * (b - a);
        if (o.sdf(pd) >= patch.radius) continue;
        const Eigen::Vector3d surface = pd - o.sdf(pd) * o.sdf_gradient(pd);
        const Eigen::Vector3d axis = closest_on_segment(a, b, surface);
        Eigen::Vector3d n = surface - axis;
        if (n.norm() < 1e-9) n = -o.sdf_gradient(pd);
        ev.world = axis + patch.radius * n.normalized();
      } else {
        const Eigen::Vector3d c = T.translation();
        Eigen::AlignedBox3d ring(c - Eigen::Vector3d(patch.radius, patch.radius, -patch.z_low),
                                 c + Eigen::Vector3d(patch.radius, patch.radius, patch.z_high));
        if (!ring.intersects(box)) continue;
        constexpr int kAround = 90, kUp = 6;
        double best_d = 0.0;
        Eigen::Vector3d best_p = Eigen::Vector3d::Zero();
        for (int i = 0; i < kAround; ++i) {
          const double phi = 2.0 * std::numbers::pi * i / kAround;
          for (int k = 0; k < kUp; ++k) {
            const double z = patch.z_low + (patch.z_high - patch.z_low) * k / (kUp - 1);
            const Eigen::Vector3d p = T * Eigen::Vector3d(patch.radius * std::cos(phi), patch.radius * std::sin(phi), z);
            if (const double d = o.sdf(p); d < best_d) best_d = d, best_p = p;
          }
        }
        if (best_d >= 0.0) continue;
        ev.world = best_p;
      }
      ev.local = T.inverse() * ev.world;
      out.push_back(std::move(ev));
    }
  }
  return out;
}

std::vector<ContactEvent> World::detect_contacts() {
  std::vector<ContactEvent> now = overlaps();
  std::set<std::pair<std::string, std::string>> next;
  for (ContactEvent& e : now) {
    const auto key = std::make_pair(e.patch, e.object);
    next.insert(key);
    e.phase = active_contacts_.count(key) ? ContactPhase::ongoing : ContactPhase::onset;
  }
  for (const auto& key : active_contacts_) {
    if (next.count(key)) continue;
    ContactEvent r;
    r.patch = key.first;
    r.object = key.second;
    r.t = diag_.clock;
    r.phase = ContactPhase::released;
    for (const auto& p : robot_->skin)
      if (p.id == key.first) {
        r.kind = p.kind;
        const Eigen::Isometry3d T = host_frame(p.host);
        r.local = p.kind == PatchKind::arm ? Eigen::Vector3d(0.5 * (p.start + p.end)) : Eigen::Vector3d(p.radius, 0, p.z_low);
        r.world = T * r.local;
      }
    now.push_back(std::move(r));
  }
  active_contacts_ = std::move(next);
  return now;
}

GraspResult World::probe_grasp(Side s) const {
  GraspResult r;
  const auto& g = robot_->gripper;
  if (held_[index(s)]) {
    r.outcome = GraspOutcome::grasped;
    r.object = held_[index(s)]->object;
    r.aperture = q_.gripper(s);
    return r;
  }
  const Eigen::Vector3d tip = fingertip(s);
  const WorldObject* best = nullptr;
  double best_d = g.capture_margin;
  for (const WorldObject& o : objects_) {
    if (o.mass != MassClass::liftable || held_by_any(o.id)) continue;
    if (const double d = o.sdf(tip); d <= best_d) best_d = d, best = &o;
  }
  r.aperture = g.aperture_min;
  if (!best) return r;
  r.object = best->id;
  if (best->grasp_width > g.aperture_max) {
    r.outcome = GraspOutcome::too_wide;
    r.aperture = q_.gripper(s);
    return r;
  }
  if (best->grasp_width > q_.gripper(s) + g.contact_overlap) {
    // fingers are already narrower than the object: they close on its surface, not around it
    r.object.clear();
    return r;
  }
  r.outcome = GraspOutcome::grasped;
  r.aperture = best->grasp_width;
  return r;
}

GraspResult World::attempt_grasp(Side s) {
  const GraspResult r = probe_grasp(s);
  if (held_[index(s)]) return r;
  aperture_target_[index(s)].reset();
  q_.gripper(s) = r.aperture;
  if (r.outcome == GraspOutcome::grasped) {
    const WorldObject* o = object(r.object);
    held_[index(s)] = Attachment{r.object, gripper_pose(s).isometry().inverse() * o->pose.isometry()};
  }
  return r;
}

void World::release(Side s) {
  auto& a = held_[index(s)];
  if (!a) return;
  WorldObject* o = object_mut(a->object);
  a.reset();
  if (!o) return;
  // Upright, yaw kept, then dropped straight down onto the first support.
  const Eigen::Matrix3d R = o->pose.orientation.toRotationMatrix();
  const Eigen::Vector3d fwd = std::hypot(R(0, 0), R(1, 0)) > 1e-6 ? Eigen::Vector3d(R.col(0)) : Eigen::Vector3d(R.col(1));
  const double yaw = std::atan2(fwd.y(), fwd.x());
  o->pose.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
  const double bottom = o->local_bounds().min().z();
  const std::string self = o->id;
  const Ray down{o->pose.position, -Eigen::Vector3d::UnitZ()};
  double support = 0.0;
  for (const WorldObject& other : objects_) {
    if (other.id == self || held_by_any(other.id)) continue;
    if (auto h = other.raycast(down); h && h->normal.z() > 0.0) support = std::max(support, down.at(h->t).z());
  }
  o->pose.position.z() = support - bottom;
}

std::optional<WorldHit> World::raycast(const Ray& ray, bool include_floor) const {
  std::optional<WorldHit> best;
  for (const WorldObject& o : objects_) {
    if (auto h = o.raycast(ray); h && (!best || h->t < best->t)) best = WorldHit{h->t, ray.at(h->t), h->normal, o.id};
  }
  if (include_floor && ray.direction.z() < -1e-12 && ray.origin.z() > 0.0) {
    const double t = -ray.origin.z() / ray.direction.z();
    if (!best || t < best->t) {
      Eigen::Vector3d p = ray.at(t);
      p.z() = 0.0;
      best = WorldHit{t, p, Eigen::Vector3d::UnitZ(), ""};
    }
  }
  return best;
}

std::vector<ColoredPoint> World::sample_depth_region(const Eigen::Vector3d& center, double radius,
                                                     int stride) const {
  std::vector<ColoredPoint> out;
  if (!(radius > 0.0) || stride < 1) return out;
  const CameraModel& cam = robot_->depth_camera;
  const Pose pose = depth_camera();

  // Pixel window covering the projected bounding cube of the region.
  double umin = 0, vmin = 0, umax = cam.width, vmax = cam.height;
  bool all_front = true;
  double lo_u = 1e300, lo_v = 1e300, hi_u = -1e300, hi_v = -1e300;
  for (int c = 0; c < 8; ++c) {
    const Eigen::Vector3d corner = center + radius * Eigen::Vector3d(c & 1 ? 1 : -1, c & 2 ? 1 : -1, c & 4 ? 1 : -1);
    const Eigen::Vector3d p = pose.inverse() * corner;
    if (p.x() <= 1e-6) {
      all_front = false;
      break;
    }
    const double u = cam.fx * (-p.y()) / p.x() + cam.cx, v = cam.fy * (-p.z()) / p.x() + cam.cy;
    lo_u = std::min(lo_u, u), hi_u = std::max(hi_u, u), lo_v = std::min(lo_v, v), hi_v = std::max(hi_v, v);
  }
  if (all_front) {
    umin = std::max(0.0, lo_u), umax = std::min<double>(cam.width, hi_u);
    vmin = std::max(0.0, lo_v), vmax = std::min<double>(cam.height, hi_v);
    if (umin > umax || vmin > vmax) return out;
  }
  const int i0 = static_cast<int>(std::floor(umin / stride)), i1 = static_cast<int>(std::ceil(umax / stride));
  const int k0 = static_cast<int>(std::floor(vmin / stride)), k1 = static_cast<int>(std::ceil(vmax / stride));
  for (int k = k0; k <= k1; ++k) {
    const double v = k * stride + 0.5;
    if (v < 0 || v > cam.height) continue;
    for (int i = i0; i <= i1; ++i) {
      const double u = i * stride + 0.5;
      if (u < 0 || u > cam.width) continue;
      const Ray ray = pixel_ray(cam, pose, {u, v});
      const auto hit = raycast(ray);
      if (!hit || (hit->point - center).norm() > radius) continue;
      Color color = kFloorColor;
      if (!hit->object.empty()) color = object(hit->object)->color;
      out.push_back({hit->point, color});
    }
  }
  return out;
}

}  // namespace surrogate
