#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <stdexcept>

#include "surrogate/telemetry/record.hpp"

namespace surrogate {

enum class ReplayMode { strict, skip };

class LogFormatError : public std::runtime_error {
 public:
  LogFormatError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct LogIssue {
  std::size_t line = 0;
  std::string message;
};

struct Timeline {
  std::optional<LogRecord> header;
  std::vector<LogRecord> records;  // everything after the header, in file order
  std::vector<LogIssue> skipped;

  std::size_t count(RecordKind k) const;
  Micros start() const;
  Micros end() const;
  Micros duration() const { return end() - start(); }
};

/// Parses a session log. Strict mode throws LogFormatError at the first bad
/// record (unparseable, unknown kind, timestamp going backwards, second
/// header); skip mode drops such records and reports them.
Timeline read_log(std::istream& in, ReplayMode mode = ReplayMode::strict);
Timeline read_log(const std::filesystem::path& path, ReplayMode mode = ReplayMode::strict);

/// Re-runs the logged commands against a fresh session built from the header,
/// issuing each at its recorded tick, and stops at `until` (default: the last
/// record's time). `after_tick` sees the session after every tick.
std::unique_ptr<Session> resimulate(const Timeline& timeline, std::optional<Micros> until = std::nullopt,
                                    const std::function<void(const Session&)>& after_tick = {});

}  // namespace surrogate
