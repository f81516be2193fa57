#include "surrogate/assess/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

namespace surrogate {

double wilcoxon_exact_p(std::size_t n, double w, Tail tail) {
  // count[s] = number of sign assignments whose positive ranks sum to s
  const std::size_t max = n * (n + 1) / 2;
  std::vector<double> count(max + 1, 0.0);
  count[0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r)
    for (std::size_t s = max; s >= r; --s) count[s] += count[s - r];
  double hits = 0.0;
  for (std::size_t s = 0; s <= max; ++s)
    if (tail == Tail::greater ? double(s) >= w - 1e-9 : double(s) <= w + 1e-9) hits += count[s];
  return hits / std::ldexp(1.0, static_cast<int>(n));
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y, Tail tail) {
  if (x.size() != y.size()) throw std::invalid_argument("paired samples differ in length");
  if (x.empty()) throw std::invalid_argument("empty sample");
  WilcoxonResult r;
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double di = x[i] - y[i];
    if (di == 0.0) ++r.zeros;
    else d.push_back(di);
  }
  if (d.empty()) throw DegenerateSample("all differences are zero");
  r.n = d.size();

  std::vector<std::size_t> order(r.n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(d[a]) < std::abs(d[b]); });
  double tie_term = 0.0;
  for (std::size_t i = 0; i < r.n;) {
    std::size_t j = i;
    while (j + 1 < r.n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const double rank = 0.5 * double(i + j) + 1.0;
    const double t = double(j - i + 1);
    if (t > 1) {
      r.ties = true;
      tie_term += t * t * t - t;
    }
    for (std::size_t k = i; k <= j; ++k) (d[order[k]] > 0 ? r.w_plus : r.w_minus) += rank;
    i = j + 1;
  }

  const double n = double(r.n);
  const double mean = n * (n + 1) / 4.0;
  const double var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0;
  if (var > 0.0) {
    r.sigma = std::sqrt(var);
    const double cc = tail == Tail::greater ? -0.5 : 0.5;
    r.z = (r.w_plus - mean + cc) / std::sqrt(var);
    r.p_normal = tail == Tail::greater ? 0.5 * std::erfc(r.z / std::sqrt(2.0)) : 0.5 * std::erfc(-r.z / std::sqrt(2.0));
  } else {
    r.p_normal = 1.0;
  }
  if (r.n <= kExactLimit && !r.ties) r.p_exact = wilcoxon_exact_p(r.n, r.w_plus, tail);
  return r;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, double mu, Tail tail) {
  const std::vector<double> y(x.size(), mu);
  return wilcoxon_signed_rank(x, y, tail);
}

std::string describe(const WilcoxonResult& r, Tail tail) {
  char buf[256];
  std::string s;
  std::snprintf(buf, sizeof buf, "n=%zu (zeros dropped: %zu)%s, W=%g, W-=%g, one-sided (%s)\n", r.n, r.zeros,
                r.ties ? ", ties" : "", r.w_plus, r.w_minus, tail == Tail::greater ? "x > y" : "x < y");
  s += buf;
  if (r.p_exact) {
    std::snprintf(buf, sizeof buf, "  exact p        = %.6g\n", *r.p_exact);
    s += buf;
  } else {
    s += "  exact p        = n/a (ties or n > 15)\n";
  }
  std::snprintf(buf, sizeof buf, "  normal approx p = %.6g (z = %.4f, tie and continuity corrected)\n", r.p_normal, r.z);
  s += buf;
  return s;
}

std::vector<PConvention> p_conventions(const WilcoxonResult& r, Tail tail) {
  std::vector<PConvention> out;
  if (r.p_exact) {
    out.push_back({"exact, one-sided", *r.p_exact});
    const double other = wilcoxon_exact_p(r.n, r.w_plus, tail == Tail::greater ? Tail::less : Tail::greater);
    out.push_back({"exact, two-sided", std::min(1.0, 2.0 * std::min(*r.p_exact, other))});
  }
  if (r.sigma > 0.0) {
    const double n = double(r.n);
    const double mean = n * (n + 1) / 4.0;
    const double excess = tail == Tail::greater ? r.w_plus - mean : mean - r.w_plus;
    const auto upper = [](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };
    for (const bool cc : {true, false}) {
      const double c = cc ? 0.5 : 0.0;
      const std::string suffix = cc ? ", continuity corrected" : ", no continuity correction";
      out.push_back({"normal, one-sided" + suffix, upper((excess - c) / r.sigma)});
      out.push_back({"normal, two-sided" + suffix, std::min(1.0, 2.0 * upper((std::abs(excess) - c) / r.sigma))});
    }
  }
  return out;
}

std::string check_reported_p(const WilcoxonResult& r, Tail tail, double reported, int digits) {
  const auto rounded = [digits](double p) {
    if (p <= 0.0) return p;
    const double scale = std::pow(10.0, digits - 1 - std::floor(std::log10(p)));
    return std::round(p * scale) / scale;
  };
  char buf[160];
  std::snprintf(buf, sizeof buf, "reported p = %g:", reported);
  std::string s = buf;
  std::vector<std::string> matches;
  for (const auto& c : p_conventions(r, tail))
    if (rounded(c.p) == rounded(reported)) matches.push_back(c.label);
  if (matches.empty()) {
    s += " matches no convention at its printed precision; convention-dependent (check the tail, exactness and correction used)\n";
  } else {
    s += " matches";
    for (std::size_t i = 0; i < matches.size(); ++i) s += (i ? "; " : " ") + matches[i];
    s += "\n";
  }
  for (const auto& c : p_conventions(r, tail)) {
    std::snprintf(buf, sizeof buf, "  %-45s %.6g\n", c.label.c_str(), c.p);
    s += buf;
  }
  return s;
}

}  // namespace surrogate
