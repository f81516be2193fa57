#include "surrogate/assess/harness.hpp"

namespace surrogate {

using nlohmann::json;

namespace {

double seconds(Micros t) { return std::chrono::duration<double>(t).count(); }
Micros micros(double s) { return std::chrono::duration_cast<Micros>(std::chrono::duration<double>(s)); }

}  // namespace

std::vector<std::string> parse_schedule(const json& doc, const AratConfig& config) {
  const json& list = doc.is_object() ? doc.at("items") : doc;
  if (!list.is_array()) throw ConfigError("/items", "expected an array of item ids");
  std::vector<std::string> ids;
  for (const auto& v : list) {
    const std::string id = v.get<std::string>();
    if (!config.find(id)) throw ConfigError("/items", "unknown item '" + id + "'");
    ids.push_back(id);
  }
  return ids;
}

std::vector<std::string> default_schedule(const AratConfig& config) {
  std::vector<std::string> ids;
  for (const auto& i : config.items) ids.push_back(i.id);
  return ids;
}

AratRun run_arat(TeleopCore& core, const AratConfig& config, Side side, const std::vector<std::string>& schedule,
                 const ItemAgent& item_agent, AgentOptions options) {
  const Restriction r = core.restriction();
  if (r.kind != Restriction::Kind::arat || r.side != side)
    throw RefusedToStart("server restriction is " + r.describe() + ", expected " + Restriction::arat(side).describe());

  AratRun run;
  std::vector<AratOutcome> outcomes;
  Agent agent(core, std::move(options));
  for (const std::string& id : schedule) {
    const AratItem* item = config.find(id);
    if (!item) throw std::invalid_argument("unknown item '" + id + "'");
    AratItemLog entry;
    entry.item = id;
    AratOutcome outcome;
    outcome.item = id;
    if (!item->feasible) {
      outcome.aborted = "skipped";
      entry.start = entry.end = seconds(agent.now());
      run.log.push_back(entry);
      outcomes.push_back(outcome);
      continue;
    }

    core.admin(LoadItemCmd{id, side});
    const Micros start = agent.now();
    entry.start = seconds(start);
    ItemMonitor monitor(agent.world(), *item, side);
    std::optional<Micros> complete;
    bool partial = false;
    const auto observe = [&] {
      const ItemProgress p = monitor.update(agent.world());
      partial |= p != ItemProgress::pending;
      if (p == ItemProgress::complete && !complete) complete = agent.now();
    };
    agent.set_observer(observe);
    agent.set_deadline(start + micros(config.timeout_s));
    try {
      item_agent(agent, *item, side);
      agent.wait([&] { return complete.has_value(); }, 2.0);
    } catch (const AgentFailure& e) {
      entry.failure = e.what();
    }
    agent.set_deadline(std::nullopt);
    agent.set_observer({});

    entry.end = seconds(agent.now());
    entry.partial = partial;
    if (complete) entry.complete_at = seconds(*complete);
    outcome.completed = complete.has_value() && seconds(*complete - start) <= config.timeout_s;
    outcome.partial = partial;
    outcome.elapsed = seconds((complete ? *complete : agent.now()) - start);
    if (!outcome.completed) outcome.aborted = entry.failure.empty() ? "incomplete" : entry.failure;
    run.log.push_back(entry);
    outcomes.push_back(outcome);
  }
  core.admin(ResetSceneCmd{});
  run.sheet = make_sheet(config, side, std::move(outcomes));
  return run;
}

SelfcareResult run_selfcare(TeleopCore& core, const TaskAgent& task, AgentOptions options, double timeout_s) {
  SelfcareResult result;
  Agent agent(core, std::move(options));
  const Micros start = agent.now();
  SelfcareMonitor monitor(agent.world(), start);
  agent.set_observer([&] { monitor.update(agent.world()); });
  agent.set_deadline(start + micros(timeout_s));
  try {
    task(agent);
    agent.wait([&] { return monitor.phases().complete(); }, 1.0);
  } catch (const AgentFailure& e) {
    result.failure = e.what();
  }
  agent.set_observer({});
  agent.set_deadline(std::nullopt);

  const World& w = agent.world();
  result.phases = monitor.phases();
  result.success = result.phases.complete();
  result.distance = straw_to_mouth(w);
  if (const WorldObject* b = w.object("bottle"); b && b->attachment_world()) result.straw_tip = *b->attachment_world();
  result.start = seconds(start);
  result.elapsed = seconds(agent.now() - start);
  return result;
}

}  // namespace surrogate
