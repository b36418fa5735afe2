#pragma once

#include <Eigen/Dense>

#include <vector>

#include "bcycle/panel.hpp"

namespace bcycle {

/// Logarithmic (base 10) month-over-month growth rates and their per-series
/// standardization. Column j holds the growth from panel month j to j + 1 and
/// is dated by the later month.
struct GrowthPanel {
  YearMonth first_month;  // date of column 0
  std::vector<GoodDescriptor> goods;
  Eigen::MatrixXd rates_raw;   // (3 G) x N'
  Eigen::MatrixXd rates_norm;  // (3 G) x N', each row mean 0 and std 1
  Eigen::VectorXd means;
  Eigen::VectorXd stds;  // population (divide by N') standard deviations

  [[nodiscard]] Eigen::Index n_goods() const { return static_cast<Eigen::Index>(goods.size()); }
  [[nodiscard]] Eigen::Index n_series() const { return rates_norm.rows(); }
  [[nodiscard]] Eigen::Index n_prime() const { return rates_norm.cols(); }
  [[nodiscard]] YearMonth month(Eigen::Index j) const { return first_month + static_cast<int>(j); }

  /// Standardizes arbitrary raw rates (rows = series). Used for synthetic
  /// panels that do not originate from levels.
  [[nodiscard]] static GrowthPanel from_rates(Eigen::MatrixXd rates,
                                              std::vector<GoodDescriptor> goods,
                                              YearMonth first_month = {2000, 1});
};

[[nodiscard]] Eigen::MatrixXd log_growth_rates(const Panel& panel);

/// (r - mean) / std per row.
[[nodiscard]] Eigen::MatrixXd normalize_with(const Eigen::MatrixXd& rates,
                                             const Eigen::VectorXd& means,
                                             const Eigen::VectorXd& stds);

[[nodiscard]] GrowthPanel to_growth(const Panel& panel);

/// Goods labelled 1..G with empty descriptions.
[[nodiscard]] std::vector<GoodDescriptor> numbered_goods(Eigen::Index n_goods);

struct AutocorrProfile {
  Eigen::MatrixXd per_series;  // (3 G) x (m_max + 1)
  Eigen::MatrixXd averaged;    // 3 x (m_max + 1), mean over goods per variable
};

/// R(m) = 1/(N'-m) sum_j w(t_j) w(t_{j+m}); R(0) is defined as 1.
[[nodiscard]] Eigen::VectorXd autocorrelation_series(const Eigen::Ref<const Eigen::VectorXd>& w,
                                                     Eigen::Index m_max);

[[nodiscard]] AutocorrProfile autocorrelation(const GrowthPanel& gp, Eigen::Index m_max = 36);

struct MovingAverage {
  Eigen::VectorXd values;
  /// Centre of each window on the 1-based time axis of the input.
  Eigen::VectorXd centers;
};

/// Centered simple moving average; output length is length - window + 1.
[[nodiscard]] MovingAverage moving_average(const Eigen::Ref<const Eigen::VectorXd>& x,
                                           Eigen::Index window = 12);

}  // namespace bcycle
