#include "surrogate/control/goals.hpp"

#include <algorithm>

namespace surrogate {

std::string_view to_string(Subsystem s) {
  switch (s) {
    case Subsystem::arm_left: return "arm_left";
    case Subsystem::arm_right: return "arm_right";
    case Subsystem::head: return "head";
    case Subsystem::base: return "base";
    case Subsystem::torso: return "torso";
    case Subsystem::gripper_left: return "gripper_left";
    case Subsystem::gripper_right: return "gripper_right";
  }
  return "head";
}

std::optional<Subsystem> parse_subsystem(std::string_view s) {
  for (std::size_t i = 0; i < kSubsystems; ++i)
    if (to_string(static_cast<Subsystem>(i)) == s) return static_cast<Subsystem>(i);
  return std::nullopt;
}

std::string_view to_string(GoalState s) {
  switch (s) {
    case GoalState::active: return "active";
    case GoalState::reached: return "reached";
    case GoalState::aborted: return "aborted";
    case GoalState::preempted: return "preempted";
  }
  return "active";
}

std::uint64_t GoalTable::issue(Subsystem s, GoalPayload payload, Micros now, std::optional<std::string> aborted) {
  const auto i = static_cast<std::size_t>(s);
  ControlGoal g;
  g.id = next_id_++;
  g.subsystem = s;
  g.payload = std::move(payload);
  g.issued = now;
  transitions_.push_back({g.id, s, GoalState::active, now, {}});
  if (aborted) {
    g.state = GoalState::aborted;
    g.finished = now;
    g.reason = *aborted;
    transitions_.push_back({g.id, s, GoalState::aborted, now, *aborted});
  } else {
    finish(s, GoalState::preempted, now, "superseded");
    active_[i] = g.id;
  }
  latest_[i] = g.id;
  const auto id = g.id;
  goals_.emplace(id, std::move(g));

  for (auto it = goals_.begin(); goals_.size() > kHistory && it != goals_.end();) {
    const bool referenced = std::find(active_.begin(), active_.end(), it->first) != active_.end() ||
                            std::find(latest_.begin(), latest_.end(), it->first) != latest_.end();
    it = referenced ? std::next(it) : goals_.erase(it);
  }
  return id;
}

void GoalTable::finish(Subsystem s, GoalState state, Micros now, std::string reason) {
  ControlGoal* g = active(s);
  if (!g || state == GoalState::active) return;
  g->state = state;
  g->finished = now;
  g->reason = reason;
  active_[static_cast<std::size_t>(s)] = 0;
  transitions_.push_back({g->id, s, state, now, std::move(reason)});
}

const ControlGoal* GoalTable::active(Subsystem s) const { return find(active_[static_cast<std::size_t>(s)]); }

ControlGoal* GoalTable::active(Subsystem s) {
  auto it = goals_.find(active_[static_cast<std::size_t>(s)]);
  return it == goals_.end() ? nullptr : &it->second;
}

const ControlGoal* GoalTable::latest(Subsystem s) const { return find(latest_[static_cast<std::size_t>(s)]); }

const ControlGoal* GoalTable::find(std::uint64_t id) const {
  auto it = goals_.find(id);
  return it == goals_.end() ? nullptr : &it->second;
}

std::vector<GoalTransition> GoalTable::drain_transitions() {
  std::vector<GoalTransition> out;
  out.swap(transitions_);
  return out;
}

}  // namespace surrogate
