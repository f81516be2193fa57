#include "surrogate/assess/fitts.hpp"

#include <cmath>
#include <map>
#include <random>
#include <string>

namespace surrogate {

FittsResult fitts_throughput(std::span<const FittsTrial> trials) {
  std::map<std::pair<double, double>, std::vector<const FittsTrial*>> groups;
  for (const auto& t : trials) {
    if (!(t.distance > 0.0) || !(t.width > 0.0)) throw std::invalid_argument("target distance and width must be > 0");
    if (!(t.movement_time > 0.0)) throw std::invalid_argument("movement time must be > 0");
    groups[{t.distance, t.width}].push_back(&t);
  }
  if (groups.empty()) throw std::invalid_argument("no trials");

  FittsResult r;
  for (const auto& [key, ts] : groups) {
    const auto label = "D=" + std::to_string(key.first) + " W=" + std::to_string(key.second);
    if (ts.size() < kMinTrialsPerCondition)
      throw std::invalid_argument(label + ": " + std::to_string(ts.size()) + " trials, need at least 5");
    FittsCondition c;
    c.distance = key.first;
    c.width = key.second;
    c.trials = ts.size();
    double mean = 0.0, mt = 0.0;
    for (const auto* t : ts) {
      mean += t->endpoint;
      mt += t->movement_time;
    }
    mean /= double(ts.size());
    c.mean_time = mt / double(ts.size());
    double ss = 0.0;
    for (const auto* t : ts) ss += (t->endpoint - mean) * (t->endpoint - mean);
    c.endpoint_sd = std::sqrt(ss / double(ts.size() - 1));
    if (c.endpoint_sd == 0.0) throw DegenerateCondition(label + ": endpoints have zero spread");
    c.effective_width = 4.133 * c.endpoint_sd;
    c.effective_id = std::log2(c.distance / c.effective_width + 1.0);
    c.throughput = c.effective_id / c.mean_time;
    r.throughput += c.throughput;
    r.conditions.push_back(c);
  }
  r.throughput /= double(r.conditions.size());
  return r;
}

std::vector<FittsTrial> simulate_pointing(std::span<const double> distances, std::span<const double> widths,
                                          std::size_t per_condition, const CursorModel& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<FittsTrial> out;
  for (double d : distances) {
    for (double w : widths) {
      for (std::size_t i = 0; i < per_condition; ++i) {
        double pos = 0.0, time = 0.0;
        for (int k = 0; k < m.max_submovements; ++k) {
          const double amplitude = d - pos;
          time += m.reaction + m.time_per_sqrt_px * std::sqrt(std::abs(amplitude));
          pos += amplitude + m.noise * std::abs(amplitude) * unit(rng);
          if (std::abs(pos - d) <= 0.5 * w) break;
        }
        out.push_back({d, w, time + m.click, pos});
      }
    }
  }
  return out;
}

}  // namespace surrogate
