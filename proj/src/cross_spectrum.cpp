#include "bcycle/cross_spectrum.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bcycle/fourier.hpp"

namespace bcycle {

namespace {
constexpr double kZ975 = 1.959963984540054;
}

Periodograms periodograms(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw InputError("periodograms: series lengths differ");
  if (x.size() < 8) throw InputError("periodograms: need at least 8 samples");
  const auto xf = dft_forward(x);
  const auto yf = dft_forward(y);
  Periodograms p;
  p.xx = xf.cwiseAbs2();
  p.yy = yf.cwiseAbs2();
  p.xy = xf.conjugate().cwiseProduct(yf);
  return p;
}

DaniellKernel modified_daniell(Eigen::Index span) {
  if (span % 2 == 0 || span < 3) throw InputError("modified Daniell span must be odd and >= 3");
  const auto h = span / 2;
  DaniellKernel kernel;
  kernel.weights.assign(static_cast<std::size_t>(span), 1.0 / (2.0 * static_cast<double>(h)));
  kernel.weights.front() = kernel.weights.back() = 1.0 / (4.0 * static_cast<double>(h));
  return kernel;
}

double DaniellKernel::equivalent_dof() const {
  double s = 0.0;
  for (double g : weights) s += g * g;
  return 2.0 / s;
}

double DaniellKernel::bandwidth(Eigen::Index length) const {
  double s = 1.0 / 12.0;
  const auto h = half();
  for (Eigen::Index l = -h; l <= h; ++l)
    s += weights[static_cast<std::size_t>(l + h)] * static_cast<double>(l * l);
  return std::sqrt(s) / static_cast<double>(length);
}

double coherency_significance_level(double eq_dof, double alpha) {
  const double m = eq_dof / 2.0;
  if (!(m > 1.0)) throw InputError("coherency significance needs more than 2 degrees of freedom");
  return 1.0 - std::pow(alpha, 1.0 / (m - 1.0));
}

Eigen::VectorXd advance(const Eigen::VectorXd& y, Eigen::Index shift) {
  const auto n = y.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j) out(j) = y((((j + shift) % n) + n) % n);
  return out;
}

CrossSpectrumEstimate coherency_phase(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                      Eigen::Index span, Eigen::Index alignment_shift,
                                      EdgeMode mode) {
  const auto n = x.size();
  if (4 * std::abs(alignment_shift) >= n) {
    throw InputError("alignment shift must be smaller than a quarter of the series length");
  }
  auto p = periodograms(x, alignment_shift == 0 ? y : advance(y, alignment_shift));
  // The zero-frequency ordinate carries the sample mean rather than spectral
  // information; replace it by the average of its neighbours.
  p.xx(0) = 0.5 * (p.xx(1) + p.xx(n - 1));
  p.yy(0) = 0.5 * (p.yy(1) + p.yy(n - 1));
  p.xy(0) = 0.5 * (p.xy(1) + p.xy(n - 1));

  const auto kernel = modified_daniell(span);
  CrossSpectrumEstimate est;
  est.length = n;
  est.alignment_shift = alignment_shift;
  est.kernel_weights = kernel.weights;
  est.bandwidth = kernel.bandwidth(n);
  est.eq_dof = kernel.equivalent_dof();
  est.level90 = coherency_significance_level(est.eq_dof, 0.10);
  est.level99 = coherency_significance_level(est.eq_dof, 0.01);

  est.s_xx = smooth_daniell(p.xx, span, mode);
  est.s_yy = smooth_daniell(p.yy, span, mode);
  est.s_xy = smooth_daniell(p.xy, span, mode);

  const double m = est.eq_dof / 2.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  est.kappa2.resize(n);
  est.phase.resize(n);
  est.phase_ci_low.resize(n);
  est.phase_ci_high.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double denom = est.s_xx(k) * est.s_yy(k);
    est.kappa2(k) = denom > 0.0 ? std::min(1.0, std::norm(est.s_xy(k)) / denom) : 0.0;
    est.phase(k) = principal_arg(est.s_xy(k)) / (2.0 * std::numbers::pi);
    if (est.kappa2(k) > est.level90) {
      const double sd = std::sqrt((1.0 / (2.0 * m)) * (1.0 / est.kappa2(k) - 1.0));
      const double half_width = kZ975 * sd / (2.0 * std::numbers::pi);
      est.phase_ci_low(k) = est.phase(k) - half_width;
      est.phase_ci_high(k) = est.phase(k) + half_width;
    } else {
      est.phase_ci_low(k) = est.phase_ci_high(k) = nan;
    }
  }
  return est;
}

DelayResult delay_in_months(const CrossSpectrumEstimate& est, Eigen::Index k) {
  if (k <= 0 || 2 * k > est.length) {
    throw InputError("delay wavenumber " + std::to_string(k) + " outside 1..N'/2");
  }
  DelayResult r;
  r.k = k;
  r.period = static_cast<double>(est.length) / static_cast<double>(k);
  r.significant = est.significant90(k);
  if (!r.significant) {
    r.delta = r.ci_low = r.ci_high = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const auto shift = static_cast<double>(est.alignment_shift);
  r.delta = est.phase(k) * r.period + shift;
  r.ci_low = est.phase_ci_low(k) * r.period + shift;
  r.ci_high = est.phase_ci_high(k) * r.period + shift;
  return r;
}

Eigen::Index alignment_from_crosscorrelation(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                             Eigen::Index max_lag) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("alignment: series lengths differ");
  const auto n = x.size();
  max_lag = std::min(max_lag, n / 4 - 1);
  const Eigen::VectorXd xc = x.array() - x.mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  Eigen::Index best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (Eigen::Index lag = -max_lag; lag <= max_lag; ++lag) {
    const double c = xc.dot(advance(yc, lag));
    if (c > best_value + 1e-12) {
      best_value = c;
      best = lag;
    }
  }
  return best;
}

}  // namespace bcycle
