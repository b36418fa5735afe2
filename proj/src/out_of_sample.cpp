#include "bcycle/out_of_sample.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "bcycle/csv.hpp"
#include "bcycle/eigenmodes.hpp"
#include "bcycle/error.hpp"

namespace bcycle {

std::string_view to_string(OosNormalization mode) {
  return mode == OosNormalization::frozen ? "frozen" : "extended";
}

OosNormalization parse_oos_normalization(std::string_view text) {
  if (text == "frozen") return OosNormalization::frozen;
  if (text == "extended") return OosNormalization::extended;
  throw InputError("unknown normalization '" + std::string(text) + "' (frozen|extended)");
}

std::optional<double> VolatilityReport::pi(Eigen::Index row, Eigen::Index j) const {
  const double v = relative(row, j);
  if (std::isnan(v)) return std::nullopt;
  return v;
}

VolatilityReport project_out_of_sample(const Eigen::MatrixXd& rates, YearMonth first_month,
                                       const std::vector<GoodDescriptor>& goods,
                                       const CorrelationModel& model, const GrowthPanel& in_sample,
                                       const std::vector<Eigen::Index>& modes,
                                       OosNormalization mode) {
  if (goods != model.goods || goods != in_sample.goods || rates.rows() != model.n_series()) {
    throw InputError("extended panel labelling does not match the in-sample model");
  }
  const auto begin = static_cast<Eigen::Index>(in_sample.first_month - first_month);
  const auto end = begin + in_sample.n_prime();
  if (begin < 0 || end > rates.cols()) {
    throw InputError("extended panel " + first_month.str() + ".." +
                     (first_month + (static_cast<int>(rates.cols()) - 1)).str() +
                     " does not cover the in-sample window " + in_sample.first_month.str() + ".." +
                     in_sample.month(in_sample.n_prime() - 1).str());
  }
  const auto m = model.n_series();
  for (auto n : modes) {
    if (n < 1 || n > m) throw InputError("mode " + std::to_string(n) + " outside 1..M");
  }

  VolatilityReport r;
  r.first_month = first_month;
  r.in_sample_begin = begin;
  r.in_sample_end = end;
  r.normalization = mode;
  r.modes = modes;
  if (mode == OosNormalization::frozen) {
    r.normalized = normalize_with(rates, in_sample.means, in_sample.stds);
  } else {
    r.normalized = GrowthPanel::from_rates(rates, goods, first_month).rates_norm;
  }
  r.coefficients = project_onto(model.eigenvectors(), r.normalized);
  r.total = r.normalized.colwise().squaredNorm().transpose();

  const auto t = rates.cols();
  const auto k = static_cast<Eigen::Index>(modes.size());
  r.partial.resize(k, t);
  r.relative.resize(k, t);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < t; ++j) {
      const double a = r.coefficients(modes[static_cast<std::size_t>(i)] - 1, j);
      r.partial(i, j) = a * a;
      r.relative(i, j) = r.total(j) < kMinVolatility ? std::numeric_limits<double>::quiet_NaN()
                                                     : a * a / r.total(j);
    }
  }
  return r;
}

VolatilityReport project_out_of_sample(const Panel& extended, const CorrelationModel& model,
                                       const GrowthPanel& in_sample,
                                       const std::vector<Eigen::Index>& modes,
                                       OosNormalization mode) {
  return project_out_of_sample(log_growth_rates(extended), extended.start + 1, extended.goods, model,
                               in_sample, modes, mode);
}

AuxSeries read_aux_series(std::istream& in, std::string label) {
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_record(in, line, line_no)) throw InputError("auxiliary series: empty input");
  const auto header = csv::split_line(line);
  if (header.size() != 2 || header[0] != "date") {
    throw InputError("auxiliary series: expected header 'date,<name>'");
  }
  if (label.empty()) label = header[1];
  std::vector<std::pair<YearMonth, double>> rows;
  while (csv::next_record(in, line, line_no)) {
    const auto f = csv::split_line(line);
    if (f.size() != 2) {
      throw InputError("auxiliary series line " + std::to_string(line_no) + ": expected 2 fields");
    }
    rows.emplace_back(YearMonth::parse(f[0]), csv::parse_double(f[1]));
  }
  if (rows.empty()) throw InputError("auxiliary series has no data rows");
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  AuxSeries aux;
  aux.label = std::move(label);
  aux.start = rows.front().first;
  aux.values.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != aux.start + static_cast<int>(i)) {
      throw InputError("auxiliary series is not a contiguous monthly range near " +
                       rows[i].first.str());
    }
    aux.values(static_cast<Eigen::Index>(i)) = rows[i].second;
  }
  return aux;
}

AuxSeries load_aux_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open auxiliary series '" + path + "'");
  return read_aux_series(in, "");
}

OverlayTable auxiliary_overlay(const VolatilityReport& report, const AuxSeries& aux) {
  const YearMonth lo = std::max(report.first_month, aux.start);
  const YearMonth hi = std::min(report.month(report.n_months() - 1), aux.last_month());
  if (hi < lo) {
    throw InputError("auxiliary series " + aux.label + " does not overlap the volatility report");
  }
  const auto n = static_cast<Eigen::Index>(hi - lo) + 1;
  const auto r0 = static_cast<Eigen::Index>(lo - report.first_month);
  const auto a0 = static_cast<Eigen::Index>(lo - aux.start);
  OverlayTable t;
  t.aux_label = aux.label;
  for (Eigen::Index i = 0; i < n; ++i) t.months.push_back(lo + static_cast<int>(i));
  t.aux = aux.values.segment(a0, n);
  t.total = report.total.segment(r0, n);
  t.relative = report.relative.middleCols(r0, n);
  return t;
}

}  // namespace bcycle
