#include "bcycle/growth.hpp"

#include <cmath>
#include <string>

#include "bcycle/error.hpp"

namespace bcycle {

namespace {

constexpr double kDegenerateStd = 1e-14;

std::string series_name(const std::vector<GoodDescriptor>& goods, Eigen::Index s) {
  const auto G = static_cast<Eigen::Index>(goods.size());
  if (G == 0) return "series " + std::to_string(s);
  return std::string(to_string(kVariables[static_cast<std::size_t>(s / G)])) + " good " +
         std::to_string(goods[static_cast<std::size_t>(s % G)].id);
}

}  // namespace

Eigen::MatrixXd log_growth_rates(const Panel& panel) {
  const auto N = panel.n_months();
  if (N < 3) throw InputError("growth rates need at least 3 months, got " + std::to_string(N));
  Eigen::MatrixXd r(panel.n_series(), N - 1);
  for (Eigen::Index s = 0; s < r.rows(); ++s)
    for (Eigen::Index j = 0; j + 1 < N; ++j)
      r(s, j) = std::log10(panel.levels(s, j + 1) / panel.levels(s, j));
  return r;
}

Eigen::MatrixXd normalize_with(const Eigen::MatrixXd& rates, const Eigen::VectorXd& means,
                               const Eigen::VectorXd& stds) {
  if (means.size() != rates.rows() || stds.size() != rates.rows()) {
    throw InputError("normalization statistics do not match the number of series");
  }
  Eigen::MatrixXd w(rates.rows(), rates.cols());
  for (Eigen::Index s = 0; s < rates.rows(); ++s)
    for (Eigen::Index j = 0; j < rates.cols(); ++j) w(s, j) = (rates(s, j) - means(s)) / stds(s);
  return w;
}

GrowthPanel GrowthPanel::from_rates(Eigen::MatrixXd rates, std::vector<GoodDescriptor> goods,
                                    YearMonth first_month) {
  if (goods.empty() || rates.rows() != kNumVariables * static_cast<Eigen::Index>(goods.size())) {
    throw InputError("rates have " + std::to_string(rates.rows()) + " rows, expected 3 x " +
                     std::to_string(goods.size()));
  }
  if (rates.cols() < 2) throw InputError("growth panel needs at least 2 time points");
  GrowthPanel gp;
  gp.first_month = first_month;
  gp.goods = std::move(goods);
  const auto n = static_cast<double>(rates.cols());
  gp.means = rates.rowwise().sum() / n;
  gp.stds.resize(rates.rows());
  for (Eigen::Index s = 0; s < rates.rows(); ++s) {
    const double var = (rates.row(s).array() - gp.means(s)).square().sum() / n;
    gp.stds(s) = std::sqrt(var);
    if (!(gp.stds(s) > kDegenerateStd)) {
      throw InputError("degenerate series (zero variance): " + series_name(gp.goods, s));
    }
  }
  gp.rates_norm = normalize_with(rates, gp.means, gp.stds);
  gp.rates_raw = std::move(rates);
  return gp;
}

GrowthPanel to_growth(const Panel& panel) {
  return GrowthPanel::from_rates(log_growth_rates(panel), panel.goods, panel.start + 1);
}

std::vector<GoodDescriptor> numbered_goods(Eigen::Index n_goods) {
  std::vector<GoodDescriptor> goods;
  for (Eigen::Index g = 1; g <= n_goods; ++g)
    goods.push_back({static_cast<int>(g), "good " + std::to_string(g), ""});
  return goods;
}

Eigen::VectorXd autocorrelation_series(const Eigen::Ref<const Eigen::VectorXd>& w,
                                       Eigen::Index m_max) {
  const auto n = w.size();
  if (m_max < 0 || m_max >= n) {
    throw InputError("autocorrelation lag " + std::to_string(m_max) + " must be below " +
                     std::to_string(n));
  }
  Eigen::VectorXd r(m_max + 1);
  r(0) = 1.0;
  for (Eigen::Index m = 1; m <= m_max; ++m) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j + m < n; ++j) acc += w(j) * w(j + m);
    r(m) = acc / static_cast<double>(n - m);
  }
  return r;
}

AutocorrProfile autocorrelation(const GrowthPanel& gp, Eigen::Index m_max) {
  if (m_max >= gp.n_prime()) {
    throw InputError("autocorrelation m_max must be below N' = " + std::to_string(gp.n_prime()));
  }
  AutocorrProfile out;
  out.per_series.resize(gp.n_series(), m_max + 1);
  for (Eigen::Index s = 0; s < gp.n_series(); ++s)
    out.per_series.row(s) = autocorrelation_series(gp.rates_norm.row(s).transpose(), m_max);
  const auto G = gp.n_goods();
  out.averaged = Eigen::MatrixXd::Zero(kNumVariables, m_max + 1);
  for (Eigen::Index v = 0; v < kNumVariables; ++v)
    out.averaged.row(v) = out.per_series.middleRows(v * G, G).colwise().mean();
  return out;
}

MovingAverage moving_average(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Index window) {
  if (window < 1 || window > x.size()) {
    throw InputError("moving-average window " + std::to_string(window) + " must lie in [1, " +
                     std::to_string(x.size()) + "]");
  }
  const auto n_out = x.size() - window + 1;
  MovingAverage out;
  out.values.resize(n_out);
  out.centers.resize(n_out);
  for (Eigen::Index i = 0; i < n_out; ++i) {
    out.values(i) = x.segment(i, window).mean();
    out.centers(i) = static_cast<double>(i) + static_cast<double>(window + 1) / 2.0;
  }
  return out;
}

}  // namespace bcycle
