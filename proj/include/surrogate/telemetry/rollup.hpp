#pragma once

#include <map>

#include "surrogate/telemetry/replay.hpp"

namespace surrogate {

/// One human-labelled interval. Times are seconds from the session start.
struct TaskLabel {
  std::string name;
  int level = 1;
  double start = 0.0;
  double end = 0.0;
  std::size_t line = 0;
};

class LabelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Whitespace-separated lines "level start end name...", '#' starts a comment.
std::vector<TaskLabel> parse_labels(std::istream& in);
std::vector<TaskLabel> load_labels(const std::filesystem::path& path);

struct CommandStats {
  std::size_t commands = 0;
  std::map<std::string, std::size_t> by_type;
  std::map<std::string, std::size_t> by_mode;  // interface mode each command belongs to
};

struct TaskRow {
  std::string name;
  int level = 1;
  std::string parent;  // empty at level 1
  double start = 0.0;
  double end = 0.0;
  double duration = 0.0;
  double children_duration = 0.0;
  CommandStats stats;
};

struct Rollup {
  double session_length = 0.0;
  CommandStats overall;
  std::vector<TaskRow> tasks;  // label order
};

/// The interface mode a logged command record belongs to ("admin" for harness commands).
std::string command_mode(const nlohmann::json& command_record_data);

/// Per-task timing table. Throws LabelError listing every overlap between
/// intervals of one level and every interval not inside a parent.
Rollup rollup(const Timeline& timeline, const std::vector<TaskLabel>& labels);

}  // namespace surrogate
