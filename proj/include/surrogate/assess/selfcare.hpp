#pragma once

#include "surrogate/telemetry/replay.hpp"

namespace surrogate {

inline constexpr double kSelfcareTolerance = 0.01;  // m, strict
inline constexpr double kLiftHeight = 0.02;

/// Straw-tip to mouth-center distance, or nullopt when the scene lacks the
/// bottle's attachment point or the mouth anchor.
std::optional<double> straw_to_mouth(const World& w);

/// True iff the bottle is held and its straw tip is strictly within 1 cm of the mouth center.
bool check_selfcare(const World& w);

struct SelfcarePhases {
  std::optional<double> grasp_lift;  // s, start -> bottle held and 2 cm above its start
  std::optional<double> delivery;    // s, that instant -> success
  std::optional<double> total;       // s, start -> success
  bool complete() const { return total.has_value(); }
};

/// Incremental phase tracker; feed it the world after every tick.
class SelfcareMonitor {
 public:
  /// Phases count from `start` (default: the world's current time).
  explicit SelfcareMonitor(const World& w, std::optional<Micros> start = std::nullopt);
  void update(const World& w);
  const SelfcarePhases& phases() const { return phases_; }

 private:
  Micros start_;
  double bottle_z_;
  std::optional<Micros> lifted_;
  SelfcarePhases phases_;
};

/// Phases of a logged self-care session, found by re-running it tick by tick.
SelfcarePhases selfcare_phases(const Timeline& log);

}  // namespace surrogate
