#pragma once

#include <Eigen/Dense>

#include <limits>
#include <span>
#include <vector>

#include "bcycle/fourier.hpp"
#include "bcycle/growth.hpp"
#include "bcycle/panel.hpp"

namespace bcycle {

/// Averaged power spectrum p(w_k) = (1/M) sum_s |w~_s(w_k)|^2 of a growth panel.
struct SpectrumSet {
  ComplexMatrix<double> coefficients;  // M x N'
  Eigen::VectorXd power;               // N', sums to N'

  [[nodiscard]] Eigen::Index n_prime() const { return power.size(); }
  /// N'/k months; infinite for k = 0.
  [[nodiscard]] double period(Eigen::Index k) const {
    return k == 0 ? std::numeric_limits<double>::infinity()
                  : static_cast<double>(n_prime()) / static_cast<double>(k);
  }
  /// Wavenumbers shown on a period axis: 1..(N'-1)/2, plus N'/2 when N' is even.
  [[nodiscard]] std::vector<Eigen::Index> half_range() const;
};

/// Spectrum of arbitrary rows (each assumed zero-mean, unit-variance).
[[nodiscard]] SpectrumSet averaged_power_spectrum(const Eigen::MatrixXd& normalized);
[[nodiscard]] SpectrumSet averaged_power_spectrum(const GrowthPanel& gp);

struct ChoppedSpectrum {
  Eigen::Index months = 0;  // S, level months kept
  SpectrumSet spectrum;
};

/// S = 234, 229, ..., 164.
[[nodiscard]] std::vector<Eigen::Index> default_chops();

inline constexpr Eigen::Index kMinChopMonths = 24;

/// Re-derives growth rates on each prefix of the panel and returns its spectrum.
[[nodiscard]] std::vector<ChoppedSpectrum> chopped_spectra(const Panel& panel,
                                                           std::span<const Eigen::Index> chops);

struct SpectralPeak {
  double period = 0.0;
  double power = 0.0;
  double prominence = 0.0;
  /// N' / T: how many full cycles the sample spans.
  double cycles = 0.0;
  /// Too few cycles observed to call it a recurring cycle.
  bool one_time_event = false;
};

struct ContinuousSpectrumOptions {
  double min_prominence = 0.0;
  double min_cycles = 3.0;
};

struct ContinuousSpectrum {
  Eigen::VectorXd periods;
  Eigen::VectorXd power;
  std::vector<SpectralPeak> peaks;  // ascending period
};

/// p(2 pi / T) evaluated on T = t_min, t_min + step, ..., <= t_max.
[[nodiscard]] ContinuousSpectrum continuous_spectrum(const GrowthPanel& gp, double t_min,
                                                     double t_max, double step = 0.01,
                                                     const ContinuousSpectrumOptions& opts = {});

/// Interior local maxima of `values` with their topographic prominence.
[[nodiscard]] std::vector<SpectralPeak> find_peaks(const Eigen::VectorXd& periods,
                                                   const Eigen::VectorXd& values,
                                                   double n_prime,
                                                   const ContinuousSpectrumOptions& opts);

}  // namespace bcycle
