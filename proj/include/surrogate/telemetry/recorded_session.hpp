#pragma once

#include "surrogate/telemetry/recorder.hpp"

namespace surrogate {

/// A session whose every command, goal transition, contact edge and sample
/// lands in the log, in the order that makes the log replayable: a command is
/// recorded before it is dispatched, its transitions right after.
class RecordedSession {
 public:
  RecordedSession(Session& session, Recorder& recorder);

  Session& session() { return session_; }
  Recorder& recorder() { return recorder_; }

  CommandResult issue(const Command& c, const std::string& client = "local", std::uint64_t seq = 0);
  void admin(const AdminCommand& c);
  void tick();

  /// Transitions and contact edges produced since the last call.
  std::vector<GoalTransition> take_transitions();
  std::vector<ContactEvent> take_contacts();

 private:
  void log_transitions();

  Session& session_;
  Recorder& recorder_;
  std::vector<GoalTransition> transitions_;
  std::vector<ContactEvent> contacts_;
};

}  // namespace surrogate
