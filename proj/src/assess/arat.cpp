#include "surrogate/assess/arat.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace surrogate {

using nlohmann::json;

std::string_view to_string(Subscale s) {
  switch (s) {
    case Subscale::grasp: return "grasp";
    case Subscale::grip: return "grip";
    case Subscale::pinch: return "pinch";
    case Subscale::gross: return "gross";
  }
  return "grasp";
}

std::string_view to_string(AratTask t) {
  switch (t) {
    case AratTask::place: return "place";
    case AratTask::pour: return "pour";
    case AratTask::gross: return "gross";
  }
  return "place";
}

const AratItem* AratConfig::find(const std::string& id) const {
  for (const auto& i : items)
    if (i.id == id) return &i;
  return nullptr;
}

AratConfig parse_arat_config(const json& doc) {
  AratConfig c;
  c.attainable_score = doc.value("attainable_score", c.attainable_score);
  c.timeout_s = doc.value("timeout_s", c.timeout_s);
  if (c.attainable_score < 0 || c.attainable_score > 3) throw ConfigError("/attainable_score", "expected 0..3");
  if (!doc.contains("items") || !doc["items"].is_array()) throw ConfigError("/items", "missing item list");
  std::set<std::string> ids;
  for (std::size_t k = 0; k < doc["items"].size(); ++k) {
    const json& j = doc["items"][k];
    const std::string path = "/items/" + std::to_string(k);
    AratItem i;
    try {
      i.id = j.at("id").get<std::string>();
      const std::string sub = j.at("subscale").get<std::string>();
      const std::string task = j.at("task").get<std::string>();
      i.object = j.value("object", "");
      i.finger = j.value("finger", "");
      i.feasible = j.at("feasible").get<bool>();
      i.note = j.value("note", "");
      bool known = false;
      for (auto s : {Subscale::grasp, Subscale::grip, Subscale::pinch, Subscale::gross})
        if (to_string(s) == sub) i.subscale = s, known = true;
      if (!known) throw ConfigError(path + "/subscale", "unknown subscale '" + sub + "'");
      known = false;
      for (auto t : {AratTask::place, AratTask::pour, AratTask::gross})
        if (to_string(t) == task) i.task = t, known = true;
      if (!known) throw ConfigError(path + "/task", "unknown task '" + task + "'");
    } catch (const json::exception& e) {
      throw ConfigError(path, e.what());
    }
    if (!ids.insert(i.id).second) throw ConfigError(path + "/id", "duplicate item '" + i.id + "'");
    if (i.task != AratTask::gross && i.object.empty()) throw ConfigError(path + "/object", "missing");
    if (i.subscale == Subscale::pinch && i.finger != "index" && i.feasible)
      throw ConfigError(path + "/feasible", "only thumb and index finger pinches can be feasible");
    c.items.push_back(std::move(i));
  }
  if (c.items.size() != 19) throw ConfigError("/items", "expected 19 items, found " + std::to_string(c.items.size()));
  return c;
}

AratConfig load_arat_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  try {
    return parse_arat_config(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
}

int score_item(const AratOutcome& o, const AratItem& item, double timeout_s) {
  if (!item.feasible) return 0;
  if (o.completed && o.elapsed < 5.0) return 3;
  if (o.completed && o.elapsed <= timeout_s) return 2;
  if (o.partial) return 1;
  return 0;
}

std::vector<ExpectedMaxLine> expected_max_table(const AratConfig& c) {
  std::vector<ExpectedMaxLine> out;
  for (auto s : {Subscale::grasp, Subscale::grip, Subscale::pinch, Subscale::gross}) {
    ExpectedMaxLine l{s};
    for (const auto& i : c.items) {
      if (i.subscale != s) continue;
      ++l.items;
      l.feasible += i.feasible;
    }
    l.points = l.feasible * c.attainable_score;
    out.push_back(l);
  }
  return out;
}

int expected_max(const AratConfig& c) {
  int total = 0;
  for (const auto& l : expected_max_table(c)) total += l.points;
  return total;
}

std::string expected_max_derivation(const AratConfig& c) {
  std::ostringstream s;
  s << "subscale  items  feasible  points (x" << c.attainable_score << ")\n";
  int items = 0, feasible = 0;
  for (const auto& l : expected_max_table(c)) {
    s << std::left;
    s.width(9);
    s << to_string(l.subscale) << "  " << l.items << (l.items < 10 ? "      " : "     ") << l.feasible
      << (l.feasible < 10 ? "         " : "        ") << l.points << "\n";
    items += l.items;
    feasible += l.feasible;
  }
  s << "total     " << items << "     " << feasible << (feasible < 10 ? "         " : "        ") << expected_max(c)
    << " / " << 3 * items << "\n";
  for (const auto& i : c.items)
    if (!i.feasible) s << "  excluded: " << i.id << (i.note.empty() ? "" : " (" + i.note + ")") << "\n";
  return s.str();
}

AratScoreSheet make_sheet(const AratConfig& c, Side side, std::vector<AratOutcome> outcomes) {
  AratScoreSheet sheet;
  sheet.side = side;
  sheet.expected_max = expected_max(c);
  sheet.maximum = 3 * static_cast<int>(c.items.size());
  for (const auto& item : c.items) {
    AratRow row{item, {item.id, false, false, 0.0, "not_run"}, 0};
    for (auto& o : outcomes)
      if (o.item == item.id) row.outcome = o;
    row.score = score_item(row.outcome, item, c.timeout_s);
    sheet.total += row.score;
    sheet.rows.push_back(std::move(row));
  }
  return sheet;
}

json to_json(const AratScoreSheet& sheet) {
  json rows = json::array();
  for (const auto& r : sheet.rows)
    rows.push_back({{"item", r.item.id},
                    {"subscale", to_string(r.item.subscale)},
                    {"feasible", r.item.feasible},
                    {"completed", r.outcome.completed},
                    {"partial", r.outcome.partial},
                    {"elapsed_s", r.outcome.elapsed},
                    {"aborted", r.outcome.aborted},
                    {"score", r.score}});
  return {{"side", to_string(sheet.side)},
          {"total", sheet.total},
          {"expected_max", sheet.expected_max},
          {"maximum", sheet.maximum},
          {"items", rows}};
}

AratScoreSheet sheet_from_json(const json& j, const AratConfig& config) {
  std::vector<AratOutcome> outcomes;
  for (const auto& r : j.at("items"))
    outcomes.push_back({r.at("item"), r.at("completed"), r.at("partial"), r.at("elapsed_s"), r.value("aborted", "")});
  return make_sheet(config, parse_side(j.at("side").get<std::string>()), std::move(outcomes));
}

double tilt(const Pose& p) {
  const Eigen::Vector3d axis = p.orientation * Eigen::Vector3d::UnitZ();
  return std::acos(std::clamp(axis.z(), -1.0, 1.0));
}

namespace {

bool held_by_any(const World& w, const std::string& id) {
  for (Side s : {Side::left, Side::right})
    if (w.held(s) && w.held(s)->object == id) return true;
  return false;
}

}  // namespace

ItemMonitor::ItemMonitor(const World& w, const AratItem& item, Side side) : item_(item), side_(side) {
  const auto t = w.anchor("target");
  if (!t) throw std::invalid_argument("item scene has no target anchor");
  target_ = *t;
  if (item.task != AratTask::gross) {
    const WorldObject* o = w.object(item.object);
    if (!o) throw std::invalid_argument("item object '" + item.object + "' is not in the scene");
    start_z_ = o->pose.position.z();
  }
}

ItemProgress ItemMonitor::update(const World& w) {
  if (item_.task == AratTask::gross) {
    const double d = (w.fingertip(side_) - target_).norm();
    partial_ |= d <= 0.15;
    if (d <= 0.05) return ItemProgress::complete;
    return partial_ ? ItemProgress::partial : ItemProgress::pending;
  }
  const WorldObject* o = w.object(item_.object);
  const Eigen::Vector3d p = o->pose.position;
  partial_ |= p.z() >= start_z_ + 0.02;
  const double horizontal = (p - target_).head<2>().norm();
  if (item_.task == AratTask::pour) {
    if (held_by_any(w, item_.object) && tilt(o->pose) >= std::numbers::pi / 2 - 1e-9 && horizontal <= 0.06 &&
        p.z() >= target_.z())
      return ItemProgress::complete;
  } else {
    // Resting on the target surface: released, centered over it and no more than its own size above it.
    const double low = o->bounds().min().z();
    if (!held_by_any(w, item_.object) && horizontal <= 0.04 && low >= target_.z() - 0.01 && low <= target_.z() + 0.01)
      return ItemProgress::complete;
  }
  return partial_ ? ItemProgress::partial : ItemProgress::pending;
}

}  // namespace surrogate
