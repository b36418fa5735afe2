#include "bcycle/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bcycle/error.hpp"

namespace bcycle {

std::vector<Eigen::Index> SpectrumSet::half_range() const {
  std::vector<Eigen::Index> ks;
  const auto n = n_prime();
  for (Eigen::Index k = 1; 2 * k <= n; ++k) ks.push_back(k);
  return ks;
}

SpectrumSet averaged_power_spectrum(const Eigen::MatrixXd& normalized) {
  SpectrumSet out;
  out.coefficients = dft_rows(normalized);
  out.power = out.coefficients.cwiseAbs2().colwise().mean().transpose();
  return out;
}

SpectrumSet averaged_power_spectrum(const GrowthPanel& gp) {
  return averaged_power_spectrum(gp.rates_norm);
}

std::vector<Eigen::Index> default_chops() {
  std::vector<Eigen::Index> chops;
  for (Eigen::Index s = 234; s >= 164; s -= 5) chops.push_back(s);
  return chops;
}

std::vector<ChoppedSpectrum> chopped_spectra(const Panel& panel,
                                             std::span<const Eigen::Index> chops) {
  for (auto s : chops) {
    if (s < kMinChopMonths) {
      throw InputError("chop of " + std::to_string(s) + " months is below the minimum of " +
                       std::to_string(kMinChopMonths));
    }
  }
  std::vector<ChoppedSpectrum> out;
  out.reserve(chops.size());
  for (auto s : chops) {
    out.push_back({s, averaged_power_spectrum(to_growth(chop(panel, s)))});
  }
  return out;
}

std::vector<SpectralPeak> find_peaks(const Eigen::VectorXd& periods, const Eigen::VectorXd& values,
                                     double n_prime, const ContinuousSpectrumOptions& opts) {
  std::vector<SpectralPeak> peaks;
  const auto n = values.size();
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    if (!(values(i) > values(i - 1) && values(i) >= values(i + 1))) continue;
    // Lowest point on each side before reaching higher ground.
    double left_min = values(i);
    for (Eigen::Index j = i - 1; j >= 0 && values(j) <= values(i); --j)
      left_min = std::min(left_min, values(j));
    double right_min = values(i);
    for (Eigen::Index j = i + 1; j < n && values(j) <= values(i); ++j)
      right_min = std::min(right_min, values(j));
    const double prominence = values(i) - std::max(left_min, right_min);
    if (prominence < opts.min_prominence) continue;
    SpectralPeak p;
    p.period = periods(i);
    p.power = values(i);
    p.prominence = prominence;
    p.cycles = n_prime / periods(i);
    p.one_time_event = p.cycles < opts.min_cycles;
    peaks.push_back(p);
  }
  return peaks;
}

ContinuousSpectrum continuous_spectrum(const GrowthPanel& gp, double t_min, double t_max,
                                       double step, const ContinuousSpectrumOptions& opts) {
  const auto n_prime = static_cast<double>(gp.n_prime());
  if (!(t_min >= 2.0 && t_min < t_max && t_max <= n_prime && step > 0.0)) {
    throw InputError("continuous spectrum grid must satisfy 2 <= t_min < t_max <= N' and step > 0");
  }
  const auto count = static_cast<Eigen::Index>(std::floor((t_max - t_min) / step + 1e-9)) + 1;
  ContinuousSpectrum out;
  out.periods.resize(count);
  out.power.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double period = t_min + static_cast<double>(i) * step;
    const double omega = 2.0 * std::numbers::pi / period;
    out.periods(i) = period;
    out.power(i) = dft_rows_at_frequency(gp.rates_norm, omega).cwiseAbs2().mean();
  }
  out.peaks = find_peaks(out.periods, out.power, n_prime, opts);
  return out;
}

}  // namespace bcycle
