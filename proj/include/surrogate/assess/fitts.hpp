#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace surrogate {

/// One pointing trial. `endpoint` is the selection point projected onto the
/// task axis, in pixels from any fixed origin.
struct FittsTrial {
  double distance = 0.0;  // D, px
  double width = 0.0;     // W, px
  double movement_time = 0.0;  // s
  double endpoint = 0.0;
};

class DegenerateCondition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMinTrialsPerCondition = 5;

struct FittsCondition {
  double distance = 0.0;
  double width = 0.0;
  std::size_t trials = 0;
  double endpoint_sd = 0.0;
  double effective_width = 0.0;  // 4.133 sd
  double effective_id = 0.0;     // log2(D / We + 1), bits
  double mean_time = 0.0;
  double throughput = 0.0;  // IDe / mean MT
};

struct FittsResult {
  std::vector<FittsCondition> conditions;  // sorted by (D, W)
  double throughput = 0.0;                 // mean over conditions, bits/s
};

/// Groups trials by (D, W). Throws invalid_argument for non-positive D, W or
/// MT or a condition with fewer than 5 trials, DegenerateCondition when a
/// condition's endpoints have zero spread.
FittsResult fitts_throughput(std::span<const FittsTrial> trials);

/// Cursor model for a simulated participant: each submovement aims at the
/// target center with endpoint noise proportional to its amplitude, and the
/// cursor keeps correcting until it lands inside the target (or gives up).
struct CursorModel {
  double noise = 0.07;             // endpoint sd per px of amplitude
  double reaction = 0.25;          // s before each submovement
  double time_per_sqrt_px = 0.02;  // s per sqrt(px) of amplitude
  double click = 0.15;             // s to confirm a selection
  int max_submovements = 6;
};

/// Trials for every (D, W) pair, `per_condition` each, deterministic in `seed`.
std::vector<FittsTrial> simulate_pointing(std::span<const double> distances, std::span<const double> widths,
                                          std::size_t per_condition, const CursorModel& model, std::uint64_t seed);

}  // namespace surrogate
