#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "bcycle/cross_spectrum.hpp"
#include "bcycle/error.hpp"
#include "fixtures.hpp"

using namespace bcycle;
using Eigen::Index;

namespace {

Eigen::VectorXd noise(Index n, std::uint64_t seed) {
  return fixtures::gaussian_matrix(1, n, seed).row(0).transpose();
}

Eigen::VectorXd cosine(Index n, Index k) {
  Eigen::VectorXd x(n);
  for (Index j = 0; j < n; ++j) x(j) = std::cos(2.0 * std::numbers::pi * k * (j + 1) / n);
  return x;
}

}  // namespace

TEST(Periodograms, SelfPairAndSignFlip) {
  const auto x = noise(64, 1);
  const auto p = periodograms(x, x);
  EXPECT_LT((p.xy.real() - p.xx).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(p.xy.imag().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(p.xx.minCoeff(), 0.0);
  const auto q = periodograms(x, Eigen::VectorXd(-x));
  EXPECT_LT((q.xy.real() + q.xx).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW((void)periodograms(x, noise(63, 2)), InputError);
  EXPECT_THROW((void)periodograms(noise(7, 1), noise(7, 2)), InputError);
}

TEST(Periodograms, CircularShiftTheorem) {
  const Index n = 48, k = 5;
  const auto x = cosine(n, k);
  const Eigen::VectorXd y = advance(x, -1);  // y(t_j) = x(t_{j-1})
  const auto p = periodograms(x, y);
  EXPECT_NEAR(std::arg(p.xy(k)), 2.0 * std::numbers::pi * k / n, 1e-12);
}

TEST(Daniell, ModifiedKernelShape) {
  const auto kernel = modified_daniell(11);
  ASSERT_EQ(kernel.weights.size(), 11u);
  EXPECT_DOUBLE_EQ(kernel.weights.front(), 1.0 / 20.0);
  EXPECT_DOUBLE_EQ(kernel.weights[5], 1.0 / 10.0);
  EXPECT_NEAR(std::accumulate(kernel.weights.begin(), kernel.weights.end(), 0.0), 1.0, 1e-15);
  for (std::size_t i = 0; i < 11; ++i) EXPECT_EQ(kernel.weights[i], kernel.weights[10 - i]);
  EXPECT_NEAR(kernel.bandwidth(239), 0.01226, 5e-6);
  EXPECT_NEAR(kernel.equivalent_dof(), 2.0 / (9 * 0.01 + 2 * 0.0025), 1e-12);
  EXPECT_THROW((void)modified_daniell(10), InputError);
}

TEST(Daniell, SmoothingConstantAndImpulse) {
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(40, 3.0);
  for (auto mode : {EdgeMode::circular, EdgeMode::truncate})
    EXPECT_LT((smooth_daniell(c, 5, mode).array() - 3.0).abs().maxCoeff(), 1e-15);
  Eigen::VectorXd impulse = Eigen::VectorXd::Zero(40);
  impulse(20) = 1.0;
  const auto s = smooth_daniell(impulse, 5);
  EXPECT_DOUBLE_EQ(s(18), 0.125);
  EXPECT_DOUBLE_EQ(s(22), 0.125);
  EXPECT_DOUBLE_EQ(s(19), 0.25);
  EXPECT_DOUBLE_EQ(s(20), 0.25);
  EXPECT_EQ(s(17), 0.0);
  Eigen::VectorXcd z = impulse.cast<std::complex<double>>() * std::complex<double>(0.0, 2.0);
  EXPECT_NEAR(smooth_daniell(z, 5)(21).imag(), 0.5, 1e-15);
  EXPECT_THROW((void)smooth_daniell(c, 4), InputError);
  EXPECT_THROW((void)smooth_daniell(c, 21), InputError);
  // Circular wrap at the edges.
  Eigen::VectorXd edge = Eigen::VectorXd::Zero(40);
  edge(0) = 1.0;
  EXPECT_DOUBLE_EQ(smooth_daniell(edge, 5)(39), 0.25);
  EXPECT_DOUBLE_EQ(smooth_daniell(edge, 5, EdgeMode::truncate)(39), 0.0);
}

TEST(Coherency, SelfPairIsPerfect) {
  const auto x = noise(239, 3);
  const auto est = coherency_phase(x, x);
  EXPECT_LT((est.kappa2.array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_LT(est.phase.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Coherency, SignificanceLevelsAndBounds) {
  const auto est = coherency_phase(noise(239, 4), noise(239, 5));
  const double m = est.eq_dof / 2.0;
  EXPECT_NEAR(est.level90, 1.0 - std::pow(0.10, 1.0 / (m - 1.0)), 1e-15);
  EXPECT_NEAR(est.level90, 0.2147, 5e-4);
  EXPECT_NEAR(est.level99, 0.3833, 5e-4);
  EXPECT_GE(est.kappa2.minCoeff(), 0.0);
  EXPECT_LE(est.kappa2.maxCoeff(), 1.0);
  for (Index k = 0; k < 239; ++k) {
    EXPECT_EQ(std::isnan(est.phase_ci_low(k)), !est.significant90(k));
  }
}

TEST(Coherency, HermitianSymmetryAndScaleInvariance) {
  const auto x = noise(120, 6);
  const Eigen::VectorXd y = 0.5 * x + noise(120, 7);
  const auto xy = coherency_phase(x, y);
  const auto yx = coherency_phase(y, x);
  EXPECT_LT((xy.s_xy.conjugate() - yx.s_xy).cwiseAbs().maxCoeff(), 1e-12);
  for (Index k = 0; k < 120; ++k) {
    if (std::abs(std::abs(xy.phase(k)) - 0.5) > 1e-9) EXPECT_NEAR(xy.phase(k), -yx.phase(k), 1e-12);
  }
  const auto scaled = coherency_phase(Eigen::VectorXd(3.0 * x), Eigen::VectorXd(0.2 * y));
  EXPECT_LT((scaled.kappa2 - xy.kappa2).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((scaled.phase - xy.phase).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Coherency, OneMonthLagOfASinusoid) {
  const Index n = 120, k = 6;
  const auto x = cosine(n, k);
  const Eigen::VectorXd y = advance(x, -1);
  const auto est = coherency_phase(x, y, 11);
  const auto d = delay_in_months(est, k);
  ASSERT_TRUE(d.significant);
  EXPECT_NEAR(d.delta, 1.0, 1e-10);
  EXPECT_NEAR(d.ci_low, 1.0, 1e-6);
  EXPECT_NEAR(d.ci_high, 1.0, 1e-6);
}

TEST(Coherency, AlignmentShiftIsAddedBack) {
  const Index n = 240;
  RngStream rng(8, 0);
  Eigen::VectorXd x(n);
  double state = 0.0;
  for (Index j = 0; j < n; ++j) x(j) = state = 0.9 * state + rng.normal();
  const Eigen::VectorXd y = advance(x, -8) + 0.3 * noise(n, 9);
  const auto shift = alignment_from_crosscorrelation(x, y, 24);
  EXPECT_EQ(shift, 8);
  const auto est = coherency_phase(x, y, 11, shift);
  EXPECT_EQ(est.alignment_shift, 8);
  const auto d = delay_in_months(est, 4);
  ASSERT_TRUE(d.significant);
  EXPECT_LE(d.ci_low, 8.0);
  EXPECT_GE(d.ci_high, 8.0);
  EXPECT_THROW((void)coherency_phase(x, y, 11, 60), InputError);
}

TEST(Coherency, NotSignificantGivesNoDelay) {
  const auto est = coherency_phase(noise(239, 10), noise(239, 11));
  for (Index k = 1; k < 119; ++k) {
    if (!est.significant90(k)) {
      const auto d = delay_in_months(est, k);
      EXPECT_FALSE(d.significant);
      EXPECT_TRUE(std::isnan(d.delta));
      EXPECT_FALSE(d.excludes_zero());
      return;
    }
  }
  FAIL() << "no insignificant frequency found";
}

TEST(Coherency, WhiteNoiseExceedanceRate) {
  Index total = 0, above = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto est = coherency_phase(noise(239, 500 + 2 * seed), noise(239, 501 + 2 * seed));
    for (Index k = 1; k <= 119; ++k) {
      ++total;
      if (est.significant90(k)) ++above;
    }
  }
  const double rate = static_cast<double>(above) / static_cast<double>(total);
  EXPECT_NEAR(rate, 0.10, 0.02);
}
