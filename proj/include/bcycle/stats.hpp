#pragma once

#include <span>

namespace bcycle {

struct SummaryStats {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) standard deviation
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Empirical quantile with linear interpolation between order statistics
/// (the "type 7" definition). `p` in [0, 1].
[[nodiscard]] double quantile(std::span<const double> samples, double p);

/// Mean, sample standard deviation, and the empirical central `ci_level`
/// interval of the samples.
[[nodiscard]] SummaryStats summary_stats(std::span<const double> samples,
                                         double ci_level = 0.95);

}  // namespace bcycle
