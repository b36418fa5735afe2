#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bcycle/growth.hpp"
#include "bcycle/jacobi.hpp"
#include "bcycle/stats.hpp"

namespace bcycle {

/// Equal-time correlation matrix of a normalized panel with its
/// eigendecomposition. Eigenvector signs make the mean production-block
/// component positive.
struct CorrelationModel {
  Eigen::MatrixXd correlation;  // M x M
  SymmetricEigenResult<double> eig;
  std::vector<GoodDescriptor> goods;
  Eigen::Index n_prime = 0;

  [[nodiscard]] Eigen::Index n_series() const { return correlation.rows(); }
  [[nodiscard]] Eigen::Index n_goods() const { return static_cast<Eigen::Index>(goods.size()); }
  [[nodiscard]] const Eigen::VectorXd& eigenvalues() const { return eig.eigenvalues; }
  [[nodiscard]] const Eigen::MatrixXd& eigenvectors() const { return eig.eigenvectors; }
};

/// C = (1/N') W W^T with the diagonal pinned to 1 and entries clipped to [-1, 1].
[[nodiscard]] Eigen::MatrixXd correlation_of(const Eigen::MatrixXd& normalized);

[[nodiscard]] CorrelationModel correlation_matrix(const GrowthPanel& gp);
/// Same, for a normalized matrix whose rows follow the panel's series layout.
[[nodiscard]] CorrelationModel correlation_matrix(const Eigen::MatrixXd& normalized,
                                                  std::vector<GoodDescriptor> goods);

/// Marchenko-Pastur parameters for Q = N'/M.
struct RmtParams {
  double sigma = 1.0;
  double q = 1.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
};

[[nodiscard]] RmtParams rmt_params_from_q(double q, double sigma = 1.0);
[[nodiscard]] RmtParams rmt_params(Eigen::Index n_prime, Eigen::Index n_series, double sigma = 1.0);

/// Marchenko-Pastur eigenvalue density; zero outside (lambda_-, lambda_+).
[[nodiscard]] double mp_density(double lambda, const RmtParams& params);

/// Wigner semicircle density on |lambda| <= 2 sigma.
[[nodiscard]] double semicircle_density(double lambda, double sigma = 1.0);

struct ModeSignificance {
  Eigen::Index mode = 0;  // 1-based
  double eigenvalue = 0.0;
  bool significant = false;
  double margin = 0.0;  // eigenvalue - lambda_+
};

struct NullDistribution {
  Eigen::Index trials = 0;
  double bin_width = 0.02;
  std::vector<double> bin_centers;
  std::vector<double> density;
  SummaryStats largest;
  SummaryStats second;
  /// 99.9th percentile of the largest null eigenvalue.
  double largest_p999 = 0.0;
  std::vector<double> largest_samples;
  std::vector<double> second_samples;
  std::vector<double> pooled;  // every null eigenvalue, trial-major
};

struct SignificanceReport {
  RmtParams params;
  std::vector<ModeSignificance> modes;         // all modes, descending eigenvalue
  std::vector<Eigen::Index> significant_modes;  // 1-based
  std::vector<std::pair<double, double>> density_curve;  // (lambda, rho)
  std::optional<NullDistribution> null_distribution;
};

[[nodiscard]] SignificanceReport classify_significance(const CorrelationModel& model,
                                                       const RmtParams& params,
                                                       Eigen::Index density_points = 200);

struct RotationOptions {
  double bin_width = 0.02;
  unsigned threads = 0;
  /// Test hook: every offset is zero.
  bool zero_shift = false;
};

/// Null model: each series is circularly rotated by an independent uniform
/// offset, which keeps its circular autocorrelation and destroys
/// cross-correlation. Trial t draws from RngStream(seed, t).
[[nodiscard]] SignificanceReport rotation_null(const GrowthPanel& gp, Eigen::Index trials,
                                               std::uint64_t seed,
                                               const RotationOptions& opts = {});

/// Circularly rotate each row by its offset: out(s, j) = w(s, (j - tau_s) mod N').
[[nodiscard]] Eigen::MatrixXd rotate_rows(const Eigen::MatrixXd& w,
                                          const std::vector<Eigen::Index>& offsets);

}  // namespace bcycle
