#include "surrogate/server/scripted_client.hpp"

namespace surrogate {

using nlohmann::json;

namespace {
bool terminal(const std::string& state) { return state == "reached" || state == "aborted" || state == "preempted"; }
}  // namespace

ScriptedClient::ScriptedClient(LoopbackLink& link, Micros heartbeat_period)
    : link_(link), heartbeat_period_(heartbeat_period) {}

std::uint64_t ScriptedClient::send_message(json msg) {
  const std::uint64_t seq = next_seq_++;
  msg["seq"] = seq;
  link_.send(msg.dump());
  return seq;
}

std::uint64_t ScriptedClient::send(const Command& c) {
  return send_message({{"type", "command"}, {"command", command_to_json(c)}});
}

std::uint64_t ScriptedClient::send_preview(const Command& c) {
  return send_message({{"type", "preview"}, {"command", command_to_json(c)}});
}

void ScriptedClient::process() {
  for (json& m : link_.poll()) {
    ++messages_;
    const std::uint64_t seq = m.value("seq", std::uint64_t{0});
    if (seq <= last_seq_) ++duplicates_;
    else if (seq != last_seq_ + 1) ++seq_gaps_;
    last_seq_ = std::max(last_seq_, seq);
    if (m.contains("event_seq")) {
      const std::uint64_t e = m["event_seq"];
      if (e <= last_event_) ++duplicates_;
      else if (e != last_event_ + 1) ++event_gaps_;
      last_event_ = std::max(last_event_, e);
    }

    const std::string type = m.value("type", "");
    if (type == "state") state_ = std::move(m);
    else if (type == "scene") scene_ = std::move(m);
    else if (type == "diagnostics" || type == "heartbeat") continue;
    else {
      if (type == "welcome") {
        welcome_ = m;
        role_ = m["role"];
      } else if (type == "lock") {
        role_ = m["role"];
      } else if (type == "ack" || type == "rejected") {
        Reply r;
        r.accepted = type == "ack";
        if (m.contains("goal")) r.goal = m["goal"].get<std::uint64_t>();
        r.reason = m.value(r.accepted ? "notice" : "reason", "");
        replies_[m["ack"].get<std::uint64_t>()] = r;
        responses_[m["ack"].get<std::uint64_t>()] = m;
      } else if (type == "preview" || type == "peek") {
        responses_[m["ack"].get<std::uint64_t>()] = m;
      } else if (type == "goal") {
        goals_[m["id"].get<std::uint64_t>()] = m;
      }
      events_.push_back(std::move(m));
    }
  }
  const Micros now = link_.core_now();
  if (last_sent_.count() < 0 || now - last_sent_ >= heartbeat_period_) {
    send_message({{"type", "heartbeat"}});
    last_sent_ = now;
  }
}

std::optional<ScriptedClient::Reply> ScriptedClient::reply(std::uint64_t seq) const {
  auto it = replies_.find(seq);
  if (it == replies_.end()) return std::nullopt;
  return it->second;
}

std::optional<json> ScriptedClient::response(std::uint64_t seq) const {
  auto it = responses_.find(seq);
  if (it == responses_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> ScriptedClient::goal_state(std::uint64_t goal) const {
  auto it = goals_.find(goal);
  if (it == goals_.end()) return std::nullopt;
  return it->second["state"].get<std::string>();
}

std::optional<json> ScriptedClient::goal_message(std::uint64_t goal) const {
  auto it = goals_.find(goal);
  if (it == goals_.end()) return std::nullopt;
  return it->second;
}

bool ScriptedClient::settled(std::uint64_t seq) const {
  const auto r = reply(seq);
  if (!r) return false;
  if (!r->goal) return true;
  const auto g = goal_state(*r->goal);
  return g && terminal(*g);
}

void step_links(TeleopCore& core, const std::vector<LoopbackLink*>& links) {
  for (auto* l : links) l->pump_uplink();
  core.step();
  for (auto* l : links) l->pump_downlink();
}

}  // namespace surrogate
