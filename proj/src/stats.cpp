#include "bcycle/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bcycle/error.hpp"

namespace bcycle {

namespace {

double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double quantile(std::span<const double> samples, double p) {
  if (samples.empty()) throw InputError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("quantile level must lie in [0, 1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted_quantile(sorted, p);
}

SummaryStats summary_stats(std::span<const double> samples, double ci_level) {
  if (samples.size() < 2) throw InputError("summary_stats needs at least 2 samples");
  if (!(ci_level > 0.0 && ci_level < 1.0)) {
    throw InputError("summary_stats: ci_level must lie in (0, 1)");
  }
  const double n = static_cast<double>(samples.size());
  SummaryStats out;
  out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(ss / (n - 1.0));

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double tail = 0.5 * (1.0 - ci_level);
  out.ci_low = sorted_quantile(sorted, tail);
  out.ci_high = sorted_quantile(sorted, 1.0 - tail);
  return out;
}

}  // namespace bcycle
