#pragma once

#include <filesystem>
#include <map>

#include "surrogate/sim/world.hpp"

namespace surrogate {

enum class Subscale { grasp, grip, pinch, gross };
enum class AratTask { place, pour, gross };

std::string_view to_string(Subscale s);
std::string_view to_string(AratTask t);

struct AratItem {
  std::string id;
  Subscale subscale = Subscale::grasp;
  AratTask task = AratTask::place;
  std::string object;  // the item's movable object; empty for gross items
  std::string finger;  // pinch items: the finger opposing the thumb
  bool feasible = true;
  std::string note;
};

struct AratConfig {
  std::vector<AratItem> items;
  int attainable_score = 2;  // what a feasible item can earn with the robot
  double timeout_s = 480.0;

  const AratItem* find(const std::string& id) const;
};

/// Throws ConfigError naming the field: 19 unique items, scores within 0..3,
/// and every pinch item not opposing the index finger marked infeasible.
AratConfig parse_arat_config(const nlohmann::json& doc);
AratConfig load_arat_config(const std::filesystem::path& path);

struct AratOutcome {
  std::string item;
  bool completed = false;
  bool partial = false;
  double elapsed = 0.0;  // s
  std::string aborted;   // "skipped", "timeout", ...
};

/// 0 for infeasible items and anything not completed within the timeout,
/// 3 under 5 s, 2 up to the timeout, 1 for a partial performance.
int score_item(const AratOutcome& outcome, const AratItem& item, double timeout_s = 480.0);

struct AratRow {
  AratItem item;
  AratOutcome outcome;
  int score = 0;
};

struct AratScoreSheet {
  Side side = Side::right;
  std::vector<AratRow> rows;
  int total = 0;
  int expected_max = 0;
  int maximum = 57;
};

struct ExpectedMaxLine {
  Subscale subscale;
  int items = 0;
  int feasible = 0;
  int points = 0;  // feasible x attainable score
};

std::vector<ExpectedMaxLine> expected_max_table(const AratConfig& config);
int expected_max(const AratConfig& config);
std::string expected_max_derivation(const AratConfig& config);

AratScoreSheet make_sheet(const AratConfig& config, Side side, std::vector<AratOutcome> outcomes);

nlohmann::json to_json(const AratScoreSheet& sheet);
AratScoreSheet sheet_from_json(const nlohmann::json& j, const AratConfig& config);

/// Angle between an object's up axis and the world vertical.
double tilt(const Pose& p);

enum class ItemProgress { pending, partial, complete };

/// Task criteria for a loaded item:
/// place: the object rests, released, within 4 cm of the target point and on its surface;
/// pour: the held glass is tilted 90 degrees or more over the target glass;
/// gross: the fingertip is within 5 cm of the target point.
/// Partial: the object was lifted 2 cm, or the fingertip came within 15 cm.
class ItemMonitor {
 public:
  ItemMonitor(const World& w, const AratItem& item, Side side);
  ItemProgress update(const World& w);
  const Eigen::Vector3d& target() const { return target_; }

 private:
  AratItem item_;
  Side side_;
  Eigen::Vector3d target_;
  double start_z_ = 0.0;
  bool partial_ = false;
};

}  // namespace surrogate
