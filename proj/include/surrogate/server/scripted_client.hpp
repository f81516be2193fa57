#pragma once

#include <map>

#include "surrogate/server/loopback.hpp"

namespace surrogate {

/// A protocol-level client for scripted agents and tests. It speaks only the
/// wire protocol: commands go out as JSON, and everything it knows about the
/// robot comes from server messages.
class ScriptedClient {
 public:
  struct Reply {
    bool accepted = false;
    std::optional<std::uint64_t> goal;
    std::string reason;  // rejection reason or ack notice
  };

  explicit ScriptedClient(LoopbackLink& link, Micros heartbeat_period = Micros{1'000'000});

  std::uint64_t send(const Command& c);
  std::uint64_t send_preview(const Command& c);
  std::uint64_t send_message(nlohmann::json msg);  // seq filled in

  /// Reads delivered messages and sends a heartbeat when one is due.
  void process();

  std::optional<Reply> reply(std::uint64_t seq) const;
  std::optional<nlohmann::json> response(std::uint64_t seq) const;  // raw preview/peek/ack message
  std::optional<std::string> goal_state(std::uint64_t goal) const;
  /// The latest goal message for `goal` (state, reason, payload such as a grasp outcome).
  std::optional<nlohmann::json> goal_message(std::uint64_t goal) const;
  /// Replied to, and its goal (if any) has finished.
  bool settled(std::uint64_t seq) const;

  const nlohmann::json& state() const { return state_; }
  const nlohmann::json& scene() const { return scene_; }
  const nlohmann::json& welcome() const { return welcome_; }
  const std::vector<nlohmann::json>& events() const { return events_; }
  std::string role() const { return role_; }

  // Delivery bookkeeping.
  std::size_t seq_gaps() const { return seq_gaps_; }
  std::size_t event_gaps() const { return event_gaps_; }
  std::size_t duplicates() const { return duplicates_; }
  std::size_t messages() const { return messages_; }

 private:
  LoopbackLink& link_;
  Micros heartbeat_period_;
  Micros last_sent_{-1};
  std::uint64_t next_seq_ = 1;
  std::uint64_t last_seq_ = 0, last_event_ = 0;
  std::size_t seq_gaps_ = 0, event_gaps_ = 0, duplicates_ = 0, messages_ = 0;
  std::map<std::uint64_t, Reply> replies_;
  std::map<std::uint64_t, nlohmann::json> responses_;
  std::map<std::uint64_t, nlohmann::json> goals_;
  std::vector<nlohmann::json> events_;
  nlohmann::json state_, scene_, welcome_;
  std::string role_;
};

/// One simulation tick with every link pumped around it.
void step_links(TeleopCore& core, const std::vector<LoopbackLink*>& links);

}  // namespace surrogate
