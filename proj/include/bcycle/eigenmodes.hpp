#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "bcycle/factor_rmt.hpp"
#include "bcycle/fourier.hpp"
#include "bcycle/growth.hpp"

namespace bcycle {

/// Growth panel expressed on the eigenvector basis:
/// w_s(t_j) = sum_n a_n(t_j) V_s^(n).
struct ModeDecomposition {
  Eigen::MatrixXd coefficients;   // a_n(t_j), modes x N'
  ComplexMatrix<double> fourier;  // a~_n(w_k), modes x N'
  Eigen::MatrixXd mode_power;     // lambda^(n)(w_k) = |a~_n(w_k)|^2
  Eigen::MatrixXd eigenvectors;   // M x M, column n-1 is mode n
  Eigen::VectorXd eigenvalues;
  std::vector<GoodDescriptor> goods;

  [[nodiscard]] Eigen::Index n_modes() const { return coefficients.rows(); }
  [[nodiscard]] Eigen::Index n_prime() const { return coefficients.cols(); }
  [[nodiscard]] Eigen::Index n_goods() const { return static_cast<Eigen::Index>(goods.size()); }
};

/// out(n, j) = sum_s basis(s, n) w(s, j), with a fixed summation order so the
/// same month yields bit-identical coefficients regardless of panel length.
[[nodiscard]] Eigen::MatrixXd project_onto(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& w);

[[nodiscard]] ModeDecomposition project_modes(const GrowthPanel& gp, const CorrelationModel& model);

/// lambda^(n)(w_k); (1/M) times the column sums equal the averaged power spectrum.
[[nodiscard]] const Eigen::MatrixXd& mode_power_spectrum(const ModeDecomposition& md);

struct PeriodBin {
  double lo = 0.0;  // months
  double hi = 0.0;
  Eigen::Index count = 0;  // wavenumbers falling in the bin
  /// Share of total power per requested mode and their sum; absent when the
  /// bin holds no wavenumber.
  std::optional<double> mode1;
  std::optional<double> mode2;
  std::optional<double> both;
};

/// One bin per wavenumber for k <= 12, then geometric bins (ratio 1.25) down
/// to a period of 2 months. Ascending edges.
[[nodiscard]] std::vector<double> default_period_bins(Eigen::Index n_prime);

/// Per bin of period (lo, hi] (the lowest bin also includes lo):
/// sum_k lambda^(n)(w_k) / sum_k M p(w_k) over wavenumbers 1..N'/2.
[[nodiscard]] std::vector<PeriodBin> binned_relative_contribution(const ModeDecomposition& md,
                                                                  const std::vector<double>& edges);

/// Restriction of the decomposition to a set of modes and wavenumbers.
struct CycleReconstruction {
  std::vector<Eigen::Index> modes;        // 1-based
  std::vector<Eigen::Index> wavenumbers;  // within 1..N'/2
  Eigen::Index n_prime = 0;
  Eigen::Index n_goods = 0;
  Eigen::MatrixXd series;                    // M x N'
  Eigen::MatrixXd averaged;                  // 3 x N', mean over goods
  std::vector<Eigen::MatrixXd> averaged_by_mode;  // one 3 x N' block per selected mode
  Eigen::MatrixXd mean_components;           // 3 x |modes|, mean over goods of V^(n)
  /// sum_n a~_n(w_k) Vbar_alpha^(n) = A_alpha exp(i phi_alpha); 3 x |wavenumbers|.
  ComplexMatrix<double> amplitudes;

  /// Column of `amplitudes` for wavenumber k, or -1.
  [[nodiscard]] Eigen::Index wavenumber_column(Eigen::Index k) const;
};

[[nodiscard]] CycleReconstruction reconstruct_cycles(const ModeDecomposition& md,
                                                     const std::vector<Eigen::Index>& modes,
                                                     const std::vector<Eigen::Index>& wavenumbers);

/// 1..M and 1..N'/2 helpers.
[[nodiscard]] std::vector<Eigen::Index> all_modes(const ModeDecomposition& md);
[[nodiscard]] std::vector<Eigen::Index> all_wavenumbers(Eigen::Index n_prime);

}  // namespace bcycle
