#include "surrogate/telemetry/replay.hpp"

#include <fstream>

namespace surrogate {

std::size_t Timeline::count(RecordKind k) const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.kind == k;
  return n;
}

Micros Timeline::start() const {
  if (header) return header->t;
  return records.empty() ? Micros{0} : records.front().t;
}

Micros Timeline::end() const { return records.empty() ? start() : records.back().t; }

Timeline read_log(std::istream& in, ReplayMode mode) {
  Timeline tl;
  std::string line;
  std::size_t number = 0;
  Micros last{std::numeric_limits<Micros::rep>::min()};
  const auto reject = [&](const std::string& why) {
    if (mode == ReplayMode::strict) throw LogFormatError(number, why);
    tl.skipped.push_back({number, why});
  };
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    LogRecord r;
    try {
      r = record_from_json(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      reject(e.what());
      continue;
    }
    if (r.t < last) {
      reject("timestamp goes backwards");
      continue;
    }
    if (r.kind == RecordKind::header) {
      if (tl.header || !tl.records.empty()) {
        reject("header must be the first record");
        continue;
      }
      tl.header = std::move(r);
    } else {
      tl.records.push_back(std::move(r));
    }
    last = tl.records.empty() ? tl.header->t : tl.records.back().t;
  }
  return tl;
}

Timeline read_log(const std::filesystem::path& path, ReplayMode mode) {
  std::ifstream in(path);
  if (!in) throw LogFormatError(0, "cannot open " + path.string());
  return read_log(in, mode);
}

std::unique_ptr<Session> resimulate(const Timeline& timeline, std::optional<Micros> until,
                                    const std::function<void(const Session&)>& after_tick) {
  if (!timeline.header) throw std::invalid_argument("log has no header; cannot rebuild the session");
  auto session = session_from_header(*timeline.header);
  const Micros stop = until.value_or(timeline.end());
  const Micros offset = timeline.header->t;
  const auto tick = [&] {
    session->tick();
    if (after_tick) after_tick(*session);
  };
  for (const auto& r : timeline.records) {
    if (r.kind != RecordKind::command) continue;
    const Micros at = r.t - offset;
    if (at > stop - offset) break;
    while (session->now() < at) tick();
    const auto& d = r.data;
    if (d.value("source", "") == "admin") session->admin(admin_from_json(d.at("command")));
    else session->issue(command_from_json(d.at("command")));
  }
  while (session->now() < stop - offset) tick();
  return session;
}

}  // namespace surrogate
