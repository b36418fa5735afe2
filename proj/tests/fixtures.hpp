#pragma once

// Synthetic panels shared by the unit and acceptance tests.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>

#include "bcycle/growth.hpp"
#include "bcycle/panel.hpp"
#include "bcycle/rng.hpp"

namespace bcycle::fixtures {

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                                       std::uint64_t stream = 0) {
  RngStream rng(seed, stream);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

/// iid normal growth rates, 3 G series.
inline GrowthPanel random_growth(Eigen::Index n_goods, Eigen::Index n_prime, std::uint64_t seed) {
  return GrowthPanel::from_rates(gaussian_matrix(3 * n_goods, n_prime, seed), numbered_goods(n_goods));
}

/// Levels whose log10 growth equals `rates` (first month level 100).
inline Panel levels_from_rates(const Eigen::MatrixXd& rates, YearMonth start = {2000, 1}) {
  Panel p;
  p.start = start;
  p.goods = numbered_goods(rates.rows() / 3);
  p.levels.resize(rates.rows(), rates.cols() + 1);
  for (Eigen::Index s = 0; s < rates.rows(); ++s) {
    double log_level = 2.0;
    p.levels(s, 0) = 100.0;
    for (Eigen::Index j = 0; j < rates.cols(); ++j) {
      log_level += rates(s, j);
      p.levels(s, j + 1) = std::pow(10.0, log_level);
    }
  }
  return p;
}

/// Two orthogonal planted factors on 63 series: u1 flat, u2 half positive and
/// half negative with one zero entry. Population correlation eigenvalues are
/// 10 and 4; the remaining 61 are equal.
struct PlantedFactorPanel {
  Eigen::VectorXd u1;
  Eigen::VectorXd u2;
  GrowthPanel growth;
};

inline PlantedFactorPanel planted_factors(std::uint64_t seed, Eigen::Index n_prime = 239) {
  constexpr Eigen::Index m = 63;
  // Spike strengths over an idiosyncratic floor of about 0.8024 per series.
  const double a1 = 9.1978;
  const double a2 = 3.1978;
  PlantedFactorPanel out;
  out.u1 = Eigen::VectorXd::Constant(m, 1.0 / std::sqrt(static_cast<double>(m)));
  out.u2 = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < m - 1; ++i) out.u2(i) = (i % 2 == 0 ? 1.0 : -1.0) / std::sqrt(62.0);
  RngStream rng(seed, 0);
  Eigen::MatrixXd w(m, n_prime);
  for (Eigen::Index j = 0; j < n_prime; ++j) {
    const double f1 = rng.normal();
    const double f2 = rng.normal();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double load1 = std::sqrt(a1) * out.u1(i);
      const double load2 = std::sqrt(a2) * out.u2(i);
      const double idio = std::sqrt(1.0 - load1 * load1 - load2 * load2);
      w(i, j) = load1 * f1 + load2 * f2 + idio * rng.normal();
    }
  }
  out.growth = GrowthPanel::from_rates(std::move(w), numbered_goods(21));
  return out;
}

/// Every production series follows the shipment driver `lag` months later
/// (circularly); inventories are pure noise. The driver is AR(1).
inline GrowthPanel planted_lag(std::uint64_t seed, Eigen::Index lag = 4, Eigen::Index n_goods = 21,
                               Eigen::Index n_prime = 240, double noise = 0.5, double phi = 0.9) {
  RngStream rng(seed, 0);
  Eigen::VectorXd driver(n_prime);
  double x = 0.0;
  for (Eigen::Index burn = 0; burn < 200; ++burn) x = phi * x + rng.normal();
  for (Eigen::Index j = 0; j < n_prime; ++j) {
    x = phi * x + rng.normal();
    driver(j) = x;
  }
  Eigen::MatrixXd r(3 * n_goods, n_prime);
  for (Eigen::Index g = 0; g < n_goods; ++g) {
    for (Eigen::Index j = 0; j < n_prime; ++j) {
      const Eigen::Index lagged = ((j - lag) % n_prime + n_prime) % n_prime;
      r(g, j) = driver(lagged) + noise * rng.normal();             // production
      r(n_goods + g, j) = driver(j) + noise * rng.normal();        // shipment
      r(2 * n_goods + g, j) = rng.normal();                        // inventory
    }
  }
  return GrowthPanel::from_rates(std::move(r), numbered_goods(n_goods));
}

}  // namespace bcycle::fixtures
