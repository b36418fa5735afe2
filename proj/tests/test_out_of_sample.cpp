#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "bcycle/eigenmodes.hpp"
#include "bcycle/error.hpp"
#include "bcycle/out_of_sample.hpp"
#include "fixtures.hpp"

using namespace bcycle;
using Eigen::Index;

namespace {

struct Setup {
  Panel extended;
  GrowthPanel in_sample;
  CorrelationModel model;
};

Setup make_setup(std::uint64_t seed) {
  const auto pf = fixtures::planted_factors(seed, 257);
  // Rescale to plausible growth magnitudes before building levels.
  const auto extended = fixtures::levels_from_rates(pf.growth.rates_raw * 0.01, {1988, 1});
  const auto [prefix, full] = split_in_sample(extended, {2007, 12});
  auto in_sample = to_growth(prefix);
  auto model = correlation_matrix(in_sample);
  return {full, std::move(in_sample), std::move(model)};
}

}  // namespace

TEST(Volatility, InSampleCoefficientsMatchDecompositionExactly) {
  const auto s = make_setup(1);
  const auto report = project_out_of_sample(s.extended, s.model, s.in_sample);
  EXPECT_EQ(report.n_months(), 257);
  EXPECT_EQ(report.in_sample_begin, 0);
  EXPECT_EQ(report.in_sample_end, 239);
  EXPECT_EQ(report.month(239).str(), "2008-01");
  const auto md = project_modes(s.in_sample, s.model);
  EXPECT_TRUE(report.coefficients.leftCols(239) == md.coefficients);
}

TEST(Volatility, TotalEqualsSumOfAllModesAndSharesSumToOne) {
  const auto s = make_setup(2);
  std::vector<Index> all;
  for (Index n = 1; n <= 63; ++n) all.push_back(n);
  const auto report = project_out_of_sample(s.extended, s.model, s.in_sample, all);
  for (Index j = 0; j < report.n_months(); ++j) {
    EXPECT_NEAR(report.partial.col(j).sum() / report.total(j), 1.0, 1e-10);
    EXPECT_NEAR(report.relative.col(j).sum(), 1.0, 1e-10);
  }
}

TEST(Volatility, IdentityHoldsForAnyOrthonormalBasis) {
  const auto s = make_setup(3);
  const Eigen::MatrixXd g = fixtures::gaussian_matrix(63, 63, 44);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  const auto report = project_out_of_sample(s.extended, s.model, s.in_sample);
  const Eigen::MatrixXd a = project_onto(q, report.normalized);
  const Eigen::VectorXd p = a.colwise().squaredNorm().transpose();
  EXPECT_LT(((p - report.total).array() / report.total.array()).abs().maxCoeff(), 1e-10);
}

TEST(Volatility, ExtendedNormalizationOption) {
  const auto s = make_setup(4);
  const auto frozen = project_out_of_sample(s.extended, s.model, s.in_sample);
  const auto ext = project_out_of_sample(s.extended, s.model, s.in_sample, {1, 2},
                                         OosNormalization::extended);
  EXPECT_EQ(frozen.normalization, OosNormalization::frozen);
  EXPECT_NEAR(ext.normalized.row(0).mean(), 0.0, 1e-12);
  EXPECT_GT((frozen.normalized - ext.normalized).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(parse_oos_normalization("extended"), OosNormalization::extended);
  EXPECT_THROW((void)parse_oos_normalization("other"), InputError);
}

TEST(Volatility, ZeroVolatilityMonthHasNoShares) {
  const auto s = make_setup(5);
  Eigen::MatrixXd rates = log_growth_rates(s.extended);
  rates.col(250) = s.in_sample.means;  // normalizes to zero
  const auto report = project_out_of_sample(rates, s.extended.start + 1, s.extended.goods, s.model,
                                            s.in_sample);
  EXPECT_LT(report.total(250), 1e-20);
  EXPECT_FALSE(report.pi(0, 250).has_value());
  EXPECT_TRUE(report.pi(0, 249).has_value());
}

TEST(Volatility, LabelMismatchAndRangeErrors) {
  const auto s = make_setup(6);
  auto renamed = s.extended;
  renamed.goods[3].label = "other";
  EXPECT_THROW((void)project_out_of_sample(renamed, s.model, s.in_sample), InputError);
  const auto shorter = chop(s.extended, 200);
  EXPECT_THROW((void)project_out_of_sample(shorter, s.model, s.in_sample), InputError);
}

TEST(Overlay, SelfJoinAndIntersection) {
  const auto s = make_setup(7);
  const auto report = project_out_of_sample(s.extended, s.model, s.in_sample);
  AuxSeries self{"P", report.first_month, report.total};
  const auto t = auxiliary_overlay(report, self);
  EXPECT_TRUE(t.aux == t.total);
  EXPECT_EQ(t.months.size(), 257u);

  std::stringstream csv;
  csv << "date,exports\n";
  for (Index j = 0; j < 150; ++j) csv << (YearMonth{2000, 1} + static_cast<int>(j)).str() << "," << j << "\n";
  const auto aux = read_aux_series(csv, "");
  EXPECT_EQ(aux.label, "exports");
  const auto half = auxiliary_overlay(report, aux);
  EXPECT_EQ(half.months.front().str(), "2000-01");
  EXPECT_EQ(half.months.back().str(), "2009-06");
  EXPECT_EQ(half.aux(0), 0.0);
  EXPECT_EQ(half.total(0), report.total(static_cast<Index>(YearMonth{2000, 1} - report.first_month)));

  AuxSeries disjoint{"x", {2015, 1}, Eigen::VectorXd::Ones(5)};
  EXPECT_THROW((void)auxiliary_overlay(report, disjoint), InputError);
}
