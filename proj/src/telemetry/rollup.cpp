#include "surrogate/telemetry/rollup.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace surrogate {

std::vector<TaskLabel> parse_labels(std::istream& in) {
  std::vector<TaskLabel> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    TaskLabel l;
    l.line = number;
    if (!(ss >> l.level)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw LabelError("line " + std::to_string(number) + ": expected 'level start end name'");
    }
    if (!(ss >> l.start >> l.end)) throw LabelError("line " + std::to_string(number) + ": bad start/end");
    std::getline(ss >> std::ws, l.name);
    while (!l.name.empty() && std::isspace(static_cast<unsigned char>(l.name.back()))) l.name.pop_back();
    if (l.name.empty()) throw LabelError("line " + std::to_string(number) + ": missing task name");
    if (l.level < 1) throw LabelError("line " + std::to_string(number) + ": level must be >= 1");
    if (!(l.end >= l.start)) throw LabelError("line " + std::to_string(number) + ": end before start");
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<TaskLabel> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LabelError("cannot open " + path.string());
  return parse_labels(in);
}

std::string command_mode(const nlohmann::json& data) {
  if (data.value("source", "") == "admin") return "admin";
  const auto& c = data.at("command");
  const std::string type = c.value("type", "");
  if (type == "look") return "looking";
  if (type == "drive" || type == "turn") return "driving";
  if (type == "spine") return "spine";
  if (type == "mode") return "mode_switch";
  return "hand_" + c.value("side", std::string("right"));
}

namespace {

void count(CommandStats& s, const LogRecord& r) {
  ++s.commands;
  ++s.by_type[r.data.at("command").value("type", "")];
  ++s.by_mode[command_mode(r.data)];
}

}  // namespace

Rollup rollup(const Timeline& timeline, const std::vector<TaskLabel>& labels) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      const auto &a = labels[i], &b = labels[j];
      if (a.level == b.level && a.start < b.end && b.start < a.end)
        problems.push_back("'" + a.name + "' (line " + std::to_string(a.line) + ") overlaps '" + b.name + "' (line " +
                           std::to_string(b.line) + ")");
    }

  Rollup out;
  const Micros t0 = timeline.start();
  const auto secs = [&](Micros t) { return std::chrono::duration<double>(t - t0).count(); };
  out.session_length = secs(timeline.end());

  for (const auto& l : labels) {
    TaskRow row;
    row.name = l.name;
    row.level = l.level;
    row.start = l.start;
    row.end = l.end;
    row.duration = l.end - l.start;
    if (l.level > 1) {
      const auto parent = std::find_if(labels.begin(), labels.end(), [&](const TaskLabel& p) {
        return p.level == l.level - 1 && p.start <= l.start && l.end <= p.end;
      });
      if (parent == labels.end())
        problems.push_back("'" + l.name + "' (line " + std::to_string(l.line) + ") is not inside any level " +
                           std::to_string(l.level - 1) + " interval");
      else
        row.parent = parent->name;
    }
    out.tasks.push_back(std::move(row));
  }
  if (!problems.empty()) {
    std::string msg = "invalid labels:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw LabelError(msg);
  }

  for (const auto& r : timeline.records) {
    if (r.kind != RecordKind::command) continue;
    count(out.overall, r);
    const double t = secs(r.t);
    for (auto& row : out.tasks)
      if (row.start <= t && t < row.end) count(row.stats, r);
  }
  for (std::size_t i = 0; i < out.tasks.size(); ++i)
    for (std::size_t j = 0; j < out.tasks.size(); ++j)
      if (labels[j].level == labels[i].level + 1 && out.tasks[j].parent == out.tasks[i].name &&
          out.tasks[i].start <= out.tasks[j].start && out.tasks[j].end <= out.tasks[i].end)
        out.tasks[i].children_duration += out.tasks[j].duration;
  return out;
}

}  // namespace surrogate
