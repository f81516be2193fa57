#pragma once

#include "surrogate/assess/experts.hpp"
#include "surrogate/assess/selfcare.hpp"

namespace surrogate {

class RefusedToStart : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ItemAgent = std::function<void(Agent&, const AratItem&, Side)>;
using TaskAgent = std::function<void(Agent&)>;

struct AratItemLog {
  std::string item;
  double start = 0.0;  // s, session clock
  double end = 0.0;
  std::optional<double> complete_at;  // s, session clock
  bool partial = false;
  std::string failure;  // the agent's error, if it gave up
};

struct AratRun {
  AratScoreSheet sheet;
  std::vector<AratItemLog> log;
};

/// Item ids from a schedule document: a JSON array of ids, or {"items": [...]}.
std::vector<std::string> parse_schedule(const nlohmann::json& doc, const AratConfig& config);
/// Every item in config order.
std::vector<std::string> default_schedule(const AratConfig& config);

/// Administers the items in `schedule` order to one agent connected as the
/// operator. Each feasible item is loaded fresh (objects placed, robot back in
/// its setup posture), timed from the load and judged by ItemMonitor until the
/// agent finishes or the item times out; infeasible items are skipped and
/// score 0. Refuses to start unless the server is in arat(side).
AratRun run_arat(TeleopCore& core, const AratConfig& config, Side side, const std::vector<std::string>& schedule,
                 const ItemAgent& agent, AgentOptions options = {});

struct SelfcareResult {
  bool success = false;
  SelfcarePhases phases;
  std::optional<double> distance;  // final straw-tip to mouth distance
  Eigen::Vector3d straw_tip = Eigen::Vector3d::Zero();
  double start = 0.0;    // s, session clock when the agent connected; phases count from here
  double elapsed = 0.0;  // s of simulated time the agent used
  std::string failure;
};

/// Runs the self-care task on a session whose world holds the self-care scene.
SelfcareResult run_selfcare(TeleopCore& core, const TaskAgent& agent, AgentOptions options = {},
                            double timeout_s = 600.0);

}  // namespace surrogate
