#pragma once

// Smoothed-periodogram cross-spectral analysis of a pair of series:
// squared coherency, phase (in cycles), null-coherency significance levels
// and large-sample phase confidence bands. No tapering is applied.

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "bcycle/error.hpp"

namespace bcycle {

struct Periodograms {
  Eigen::VectorXd xx;
  Eigen::VectorXd yy;
  Eigen::VectorXcd xy;  // conj(x~) y~
};

[[nodiscard]] Periodograms periodograms(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

enum class EdgeMode {
  circular,  // wrap around in k
  truncate,  // drop out-of-range ordinates and renormalize the weights
};

/// Modified Daniell kernel of total length `span` (odd): equal interior
/// weights, half weight at both ends, summing to 1.
struct DaniellKernel {
  std::vector<double> weights;  // offsets -half..half

  [[nodiscard]] Eigen::Index half() const { return static_cast<Eigen::Index>(weights.size() / 2); }
  /// 2 / sum gamma^2.
  [[nodiscard]] double equivalent_dof() const;
  /// sqrt(1/12 + sum gamma_l l^2) / length, in cycles per month.
  [[nodiscard]] double bandwidth(Eigen::Index length) const;
};

[[nodiscard]] DaniellKernel modified_daniell(Eigen::Index span);

template <typename Vector>
[[nodiscard]] Vector smooth_daniell(const Vector& ordinates, Eigen::Index span,
                                    EdgeMode mode = EdgeMode::circular) {
  if (span % 2 == 0) throw InputError("Daniell span must be odd");
  const auto n = ordinates.size();
  if (span < 3 || 2 * span > n) {
    throw InputError("Daniell span must lie in [3, length/2]");
  }
  const auto kernel = modified_daniell(span);
  const auto h = kernel.half();
  Vector out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    typename Vector::Scalar acc(0);
    double weight = 0.0;
    for (Eigen::Index l = -h; l <= h; ++l) {
      Eigen::Index idx = k + l;
      if (mode == EdgeMode::circular) {
        idx = ((idx % n) + n) % n;
      } else if (idx < 0 || idx >= n) {
        continue;
      }
      const double g = kernel.weights[static_cast<std::size_t>(l + h)];
      acc += g * ordinates(idx);
      weight += g;
    }
    out(k) = acc / weight;
  }
  return out;
}

struct CrossSpectrumEstimate {
  Eigen::Index length = 0;
  Eigen::Index alignment_shift = 0;
  std::vector<double> kernel_weights;
  double bandwidth = 0.0;  // cycles per month
  double eq_dof = 0.0;
  double level90 = 0.0;  // null-coherency significance levels
  double level99 = 0.0;

  Eigen::VectorXd s_xx;
  Eigen::VectorXd s_yy;
  Eigen::VectorXcd s_xy;
  Eigen::VectorXd kappa2;
  Eigen::VectorXd phase;  // cycles, s_xy = |s_xy| exp(2 pi i phase)
  /// 95% phase band in cycles; NaN where kappa2 does not exceed level90.
  Eigen::VectorXd phase_ci_low;
  Eigen::VectorXd phase_ci_high;

  [[nodiscard]] bool significant90(Eigen::Index k) const { return kappa2(k) > level90; }
  [[nodiscard]] bool significant99(Eigen::Index k) const { return kappa2(k) > level99; }
};

/// Null significance level c = 1 - alpha^(1/(m-1)) for squared coherency,
/// with m = eq_dof / 2.
[[nodiscard]] double coherency_significance_level(double eq_dof, double alpha);

/// When `alignment_shift` is nonzero, y is advanced by that many months
/// (circularly) before estimation and the shift is added back to delays.
[[nodiscard]] CrossSpectrumEstimate coherency_phase(const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& y, Eigen::Index span = 11,
                                                    Eigen::Index alignment_shift = 0,
                                                    EdgeMode mode = EdgeMode::circular);

struct DelayResult {
  Eigen::Index k = 0;
  double period = 0.0;
  /// Coherency exceeds the 90% null level; otherwise no delay is reported.
  bool significant = false;
  double delta = 0.0;  // months, y behind x when positive; NaN if not significant
  double ci_low = 0.0;
  double ci_high = 0.0;

  [[nodiscard]] bool excludes_zero() const { return significant && (ci_low > 0.0 || ci_high < 0.0); }
};

[[nodiscard]] DelayResult delay_in_months(const CrossSpectrumEstimate& est, Eigen::Index k);

/// Lag (months) maximizing the circular cross-correlation of y(t + lag) with
/// x(t), searched over |lag| <= max_lag.
[[nodiscard]] Eigen::Index alignment_from_crosscorrelation(const Eigen::VectorXd& x,
                                                           const Eigen::VectorXd& y,
                                                           Eigen::Index max_lag);

/// y(t + shift), circular.
[[nodiscard]] Eigen::VectorXd advance(const Eigen::VectorXd& y, Eigen::Index shift);

}  // namespace bcycle
