#include "surrogate/telemetry/recorded_session.hpp"

namespace surrogate {

RecordedSession::RecordedSession(Session& session, Recorder& recorder) : session_(session), recorder_(recorder) {
  recorder_.header(session_);
}

void RecordedSession::log_transitions() {
  for (auto& t : session_.controller().drain_transitions()) {
    recorder_.goal(t);
    transitions_.push_back(std::move(t));
  }
}

CommandResult RecordedSession::issue(const Command& c, const std::string& client, std::uint64_t seq) {
  recorder_.command(session_.now(), operator_command_data(c, client, seq));
  const CommandResult r = session_.issue(c);
  log_transitions();
  return r;
}

void RecordedSession::admin(const AdminCommand& c) {
  recorder_.command(session_.now(), admin_command_data(c));
  session_.admin(c);
  log_transitions();
}

void RecordedSession::tick() {
  auto contacts = session_.tick();
  log_transitions();
  for (auto& e : contacts) {
    if (e.phase == ContactPhase::ongoing) continue;
    recorder_.contact(e);
    contacts_.push_back(std::move(e));
  }
  recorder_.sample(session_.world());
}

std::vector<GoalTransition> RecordedSession::take_transitions() {
  std::vector<GoalTransition> out;
  out.swap(transitions_);
  return out;
}

std::vector<ContactEvent> RecordedSession::take_contacts() {
  std::vector<ContactEvent> out;
  out.swap(contacts_);
  return out;
}

}  // namespace surrogate
