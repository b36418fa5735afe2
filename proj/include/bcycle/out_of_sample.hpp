#pragma once

// Volatility decomposition of an extended panel on frozen in-sample
// eigenvectors.

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bcycle/factor_rmt.hpp"
#include "bcycle/growth.hpp"
#include "bcycle/panel.hpp"

namespace bcycle {

enum class OosNormalization {
  frozen,    // in-sample means and standard deviations
  extended,  // statistics of the whole extended window
};

[[nodiscard]] std::string_view to_string(OosNormalization mode);
[[nodiscard]] OosNormalization parse_oos_normalization(std::string_view text);

/// Relative contributions below this total volatility are reported as absent.
inline constexpr double kMinVolatility = 1e-12;

struct VolatilityReport {
  YearMonth first_month;        // date of column 0
  Eigen::Index in_sample_end = 0;  // columns [0, in_sample_end) lie inside the in-sample window
  Eigen::Index in_sample_begin = 0;
  OosNormalization normalization = OosNormalization::frozen;
  std::vector<Eigen::Index> modes;  // 1-based, rows of `partial` and `relative`

  Eigen::MatrixXd normalized;    // M x T
  Eigen::MatrixXd coefficients;  // a_n(t) for every mode, M x T
  Eigen::VectorXd total;         // P(t) = sum_s w_s(t)^2
  Eigen::MatrixXd partial;       // |a_n(t)|^2 for the requested modes
  Eigen::MatrixXd relative;      // partial / P; NaN where P < kMinVolatility

  [[nodiscard]] Eigen::Index n_months() const { return total.size(); }
  [[nodiscard]] YearMonth month(Eigen::Index j) const { return first_month + static_cast<int>(j); }
  [[nodiscard]] std::optional<double> pi(Eigen::Index row, Eigen::Index j) const;
};

/// `rates` are raw growth rates dated from `first_month`, laid out like the
/// in-sample panel. The in-sample window must lie inside the extended one.
[[nodiscard]] VolatilityReport project_out_of_sample(const Eigen::MatrixXd& rates,
                                                     YearMonth first_month,
                                                     const std::vector<GoodDescriptor>& goods,
                                                     const CorrelationModel& model,
                                                     const GrowthPanel& in_sample,
                                                     const std::vector<Eigen::Index>& modes = {1, 2},
                                                     OosNormalization mode = OosNormalization::frozen);

[[nodiscard]] VolatilityReport project_out_of_sample(const Panel& extended,
                                                     const CorrelationModel& model,
                                                     const GrowthPanel& in_sample,
                                                     const std::vector<Eigen::Index>& modes = {1, 2},
                                                     OosNormalization mode = OosNormalization::frozen);

/// A single monthly series, read from `date,value` CSV.
struct AuxSeries {
  std::string label;
  YearMonth start;
  Eigen::VectorXd values;

  [[nodiscard]] YearMonth last_month() const { return start + (static_cast<int>(values.size()) - 1); }
};

[[nodiscard]] AuxSeries read_aux_series(std::istream& in, std::string label);
[[nodiscard]] AuxSeries load_aux_series(const std::string& path);

struct OverlayTable {
  std::string aux_label;
  std::vector<YearMonth> months;
  Eigen::VectorXd aux;
  Eigen::VectorXd total;
  Eigen::MatrixXd relative;  // requested modes x months
};

/// Joins the auxiliary series with P(t) and pi_n(t) on their common months.
[[nodiscard]] OverlayTable auxiliary_overlay(const VolatilityReport& report, const AuxSeries& aux);

}  // namespace bcycle
