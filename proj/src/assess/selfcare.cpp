#include "surrogate/assess/selfcare.hpp"

namespace surrogate {

namespace {
const char* kBottle = "bottle";
const char* kMouth = "mouth_center";

bool bottle_held(const World& w) {
  for (Side s : {Side::left, Side::right})
    if (w.held(s) && w.held(s)->object == kBottle) return true;
  return false;
}

double seconds(Micros d) { return std::chrono::duration<double>(d).count(); }
}  // namespace

std::optional<double> straw_to_mouth(const World& w) {
  const WorldObject* bottle = w.object(kBottle);
  const auto mouth = w.anchor(kMouth);
  if (!bottle || !mouth) return std::nullopt;
  const auto tip = bottle->attachment_world();
  if (!tip) return std::nullopt;
  return (*tip - *mouth).norm();
}

bool check_selfcare(const World& w) {
  const auto d = straw_to_mouth(w);
  return d && bottle_held(w) && *d < kSelfcareTolerance;
}

SelfcareMonitor::SelfcareMonitor(const World& w, std::optional<Micros> start) : start_(start.value_or(w.now())) {
  const WorldObject* bottle = w.object(kBottle);
  if (!bottle || !w.anchor(kMouth)) throw std::invalid_argument("not a self-care scene: no bottle or mouth anchor");
  bottle_z_ = bottle->pose.position.z();
}

void SelfcareMonitor::update(const World& w) {
  if (phases_.complete()) return;
  if (!lifted_ && bottle_held(w) && w.object(kBottle)->pose.position.z() >= bottle_z_ + kLiftHeight) {
    lifted_ = w.now();
    phases_.grasp_lift = seconds(*lifted_ - start_);
  }
  if (check_selfcare(w)) {
    phases_.total = seconds(w.now() - start_);
    if (lifted_) phases_.delivery = seconds(w.now() - *lifted_);
  }
}

SelfcarePhases selfcare_phases(const Timeline& log) {
  std::unique_ptr<SelfcareMonitor> monitor;
  resimulate(log, std::nullopt, [&](const Session& s) {
    // Nothing moves in the first tick, so the bottle's height there is its start height.
    if (!monitor) monitor = std::make_unique<SelfcareMonitor>(s.world(), Micros{0});
    monitor->update(s.world());
  });
  return monitor ? monitor->phases() : SelfcarePhases{};
}

}  // namespace surrogate
