#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace surrogate {

class DegenerateSample : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One-sided alternative: differences x - y tend to be positive (greater) or negative (less).
enum class Tail { greater, less };

struct WilcoxonResult {
  std::size_t n = 0;      // nonzero differences
  std::size_t zeros = 0;  // dropped
  bool ties = false;
  double w_plus = 0.0;    // W: rank sum of the positive differences
  double w_minus = 0.0;
  std::optional<double> p_exact;  // n <= 15 and no ties
  double sigma = 0.0;  // sd of W under H0, tie corrected
  double z = 0.0;
  double p_normal = 0.0;  // tie- and continuity-corrected
  double p() const { return p_exact.value_or(p_normal); }
};

inline constexpr std::size_t kExactLimit = 15;

/// Paired signed-rank test: zeros dropped, tied magnitudes get mid-ranks.
/// Throws DegenerateSample when every difference is zero, invalid_argument on
/// unequal lengths or an empty sample.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y, Tail tail);
/// One-sample form against a constant.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, double mu, Tail tail);

/// P(W+ >= w) (greater) or P(W+ <= w) (less) under H0 for untied ranks 1..n.
double wilcoxon_exact_p(std::size_t n, double w, Tail tail);

std::string describe(const WilcoxonResult& r, Tail tail);

/// The same data under the usual reporting conventions (exact or normal,
/// one- or two-sided, with or without continuity correction).
struct PConvention {
  std::string label;
  double p = 0.0;
};
std::vector<PConvention> p_conventions(const WilcoxonResult& r, Tail tail);

/// Checks a published p against every convention at the precision it was
/// printed with (`digits` significant figures) and explains the result.
std::string check_reported_p(const WilcoxonResult& r, Tail tail, double reported, int digits = 2);

}  // namespace surrogate
