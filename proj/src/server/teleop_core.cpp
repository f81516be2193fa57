#include "surrogate/server/teleop_core.hpp"

namespace surrogate {

using nlohmann::json;

TeleopCore::TeleopCore(RecordedSession& session, CoreOptions options) : rs_(session), options_(std::move(options)) {
  if (options_.restriction.kind != Restriction::Kind::full)
    rs_.admin(RestrictionCmd{"arat", options_.restriction.side});
  const Micros now = rs_.session().now();
  next_snapshot_ = now + options_.snapshot_period;
  next_scene_ = now + options_.scene_period;
  next_diagnostics_ = now + options_.diagnostics_period;
  next_heartbeat_ = now + options_.heartbeat_period;
}

void TeleopCore::set_output_callback(std::function<void(ClientId)> cb) {
  std::lock_guard lock(mutex_);
  on_output_ = std::move(cb);
}

std::optional<ClientId> TeleopCore::connect(std::string_view token) {
  std::function<void(ClientId)> cb;
  ClientId id;
  {
    std::lock_guard lock(mutex_);
    if (token != options_.token) return std::nullopt;
    id = next_client_++;
    Client& c = clients_[id];
    c.is_operator = true;
    for (const auto& [other, oc] : clients_)
      if (other != id && oc.is_operator) c.is_operator = false;
    c.last_heard = rs_.session().now();
    push_event(c, welcome_message(id, c.is_operator, options_.restriction, rs_.session().world()));
    const auto t = rs_.session().now().count();
    c.state = state_message(rs_.session(), options_.restriction);
    c.scene = scene_message(rs_.session().world());
    c.diagnostics = diagnostics_message(rs_.session().world());
    for (auto* slot : {&c.state, &c.scene, &c.diagnostics}) (**slot)["t"] = t;
    cb = on_output_;
  }
  if (cb) cb(id);
  return id;
}

void TeleopCore::disconnect(ClientId id) {
  std::lock_guard lock(mutex_);
  clients_.erase(id);  // a vacated lock waits for an explicit claim
}

void TeleopCore::receive(ClientId id, std::string text) {
  std::lock_guard lock(mutex_);
  if (clients_.count(id)) inbox_.push_back({id, std::move(text)});
}

bool TeleopCore::closed(ClientId id) const {
  std::lock_guard lock(mutex_);
  auto it = clients_.find(id);
  return it == clients_.end() || it->second.closed;
}

Restriction TeleopCore::restriction() const {
  std::lock_guard lock(mutex_);
  return options_.restriction;
}

std::optional<ClientId> TeleopCore::operator_client() const {
  std::lock_guard lock(mutex_);
  for (const auto& [id, c] : clients_)
    if (c.is_operator) return id;
  return std::nullopt;
}

std::size_t TeleopCore::clients() const {
  std::lock_guard lock(mutex_);
  return clients_.size();
}

std::vector<std::string> TeleopCore::drain(ClientId id) {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  auto it = clients_.find(id);
  if (it == clients_.end()) return out;
  Client& c = it->second;
  const auto emit = [&](json& m) {
    m["seq"] = c.next_seq++;
    out.push_back(m.dump());
  };
  for (auto& m : c.events) emit(m);
  c.events.clear();
  for (auto* slot : {&c.state, &c.scene, &c.diagnostics}) {
    if (*slot) emit(**slot);
    slot->reset();
  }
  return out;
}

void TeleopCore::push_event(Client& c, json msg) {
  msg["t"] = rs_.session().now().count();
  msg["event_seq"] = ++c.event_seq;
  c.events.push_back(std::move(msg));
}

void TeleopCore::broadcast_event(const json& msg) {
  for (auto& [id, c] : clients_)
    if (!c.closed) push_event(c, msg);
}

void TeleopCore::apply_admin(const AdminCommand& a) {
  rs_.admin(a);
  if (const auto* r = std::get_if<RestrictionCmd>(&a)) {
    options_.restriction = r->mode == "full" ? Restriction::full() : Restriction::arat(r->side);
    broadcast_event({{"type", "restriction"}, {"restriction", options_.restriction.describe()}});
  }
  if (std::holds_alternative<LoadItemCmd>(a) || std::holds_alternative<ResetSceneCmd>(a))
    broadcast_event(scene_layout_message(rs_.session().world()));
  for (const auto& t : rs_.take_transitions())
    broadcast_event(goal_message(t, rs_.session().controller().goals().find(t.goal)));
}

void TeleopCore::admin(const AdminCommand& a) {
  {
    std::lock_guard lock(mutex_);
    apply_admin(a);
  }
  notify_all();
}

void TeleopCore::handle(ClientId id, Client& c, const std::string& text) {
  Session& s = rs_.session();
  c.last_heard = s.now();
  ClientMessage m;
  try {
    m = parse_client_message(text);
  } catch (const ProtocolError& e) {
    std::uint64_t seq = 0;
    try {
      seq = json::parse(text).value("seq", std::uint64_t{0});
    } catch (...) {
    }
    push_event(c, rejected_message(seq, e.what()));
    return;
  }
  if (c.seen_seq && m.seq <= c.last_seq) return;  // stale or duplicate: dropped silently
  c.seen_seq = true;
  c.last_seq = m.seq;

  switch (m.kind) {
    case ClientKind::heartbeat: return;
    case ClientKind::claim_lock: {
      bool held = false;
      for (const auto& [other, oc] : clients_) held |= other != id && oc.is_operator;
      if (!held) c.is_operator = true;
      push_event(c, lock_message(c.is_operator));
      return;
    }
    case ClientKind::admin:
      if (options_.admin_token.empty() || m.admin_token != options_.admin_token) {
        push_event(c, rejected_message(m.seq, "admin: not authorized"));
        return;
      }
      apply_admin(*m.admin);
      push_event(c, {{"type", "ack"}, {"ack", m.seq}});
      return;
    case ClientKind::preview: {
      if (!options_.restriction.allows(*m.command)) {
        push_event(c, rejected_message(m.seq, "restricted: " + options_.restriction.describe()));
        return;
      }
      push_event(c, preview_message(m.seq, s.controller().preview(s.world(), *as_hand_command(*m.command))));
      return;
    }
    case ClientKind::peek:
      push_event(c, peek_message(m.seq, s.world(), m.peek));
      return;
    case ClientKind::command: {
      if (!c.is_operator) {
        push_event(c, rejected_message(m.seq, "not the operator"));
        return;
      }
      if (!options_.restriction.allows(*m.command)) {
        push_event(c, rejected_message(m.seq, "restricted: " + options_.restriction.describe()));
        return;
      }
      const CommandResult r = rs_.issue(*m.command, std::to_string(id), m.seq);
      push_event(c, ack_message(m.seq, r));
      for (const auto& t : rs_.take_transitions())
        broadcast_event(goal_message(t, s.controller().goals().find(t.goal)));
      return;
    }
  }
}

void TeleopCore::step() {
  {
    std::lock_guard lock(mutex_);
    std::deque<Inbound> inbox;
    inbox.swap(inbox_);
    for (auto& in : inbox) {
      auto it = clients_.find(in.client);
      if (it != clients_.end() && !it->second.closed) handle(in.client, it->second, in.text);
    }

    rs_.tick();
    Session& s = rs_.session();
    for (const auto& t : rs_.take_transitions())
      broadcast_event(goal_message(t, s.controller().goals().find(t.goal)));
    for (const auto& e : rs_.take_contacts()) broadcast_event(contact_message(e));

    const Micros now = s.now();
    const auto due = [now](Micros& next, Micros period) {
      if (now < next) return false;
      next += period * ((now - next) / period + 1);
      return true;
    };
    const auto stamped = [now](json m) {
      m["t"] = now.count();
      return m;
    };
    if (due(next_snapshot_, options_.snapshot_period)) {
      const json m = stamped(state_message(s, options_.restriction));
      for (auto& [id, c] : clients_) c.state = m;
    }
    if (due(next_scene_, options_.scene_period)) {
      const json m = stamped(scene_message(s.world()));
      for (auto& [id, c] : clients_) c.scene = m;
    }
    if (due(next_diagnostics_, options_.diagnostics_period)) {
      const json m = stamped(diagnostics_message(s.world()));
      for (auto& [id, c] : clients_) c.diagnostics = m;
    }
    if (due(next_heartbeat_, options_.heartbeat_period)) broadcast_event({{"type", "heartbeat"}});
    for (auto& [id, c] : clients_) {
      if (!c.closed && now - c.last_heard > options_.silence_timeout) {
        push_event(c, {{"type", "closed"}, {"reason", "silence"}});
        c.closed = true;
        c.is_operator = false;
      }
    }
  }
  notify_all();
}

void TeleopCore::notify_all() {
  std::function<void(ClientId)> cb;
  std::vector<ClientId> ids;
  {
    std::lock_guard lock(mutex_);
    cb = on_output_;
    for (const auto& [id, c] : clients_) ids.push_back(id);
  }
  if (cb)
    for (ClientId id : ids) cb(id);
}

}  // namespace surrogate
