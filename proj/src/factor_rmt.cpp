#include "bcycle/factor_rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bcycle/error.hpp"
#include "bcycle/parallel.hpp"
#include "bcycle/rng.hpp"

namespace bcycle {

Eigen::MatrixXd correlation_of(const Eigen::MatrixXd& normalized) {
  const auto m = normalized.rows();
  const double n = static_cast<double>(normalized.cols());
  Eigen::MatrixXd c = (normalized * normalized.transpose()) / n;
  for (Eigen::Index i = 0; i < m; ++i) {
    c(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = std::clamp(0.5 * (c(i, j) + c(j, i)), -1.0, 1.0);
      c(i, j) = c(j, i) = v;
    }
  }
  return c;
}

CorrelationModel correlation_matrix(const Eigen::MatrixXd& normalized,
                                    std::vector<GoodDescriptor> goods) {
  CorrelationModel model;
  model.goods = std::move(goods);
  model.n_prime = normalized.cols();
  model.correlation = correlation_of(normalized);
  JacobiOptions opts;
  opts.sign_block = model.n_goods();
  model.eig = eig_symmetric(model.correlation, opts);
  return model;
}

CorrelationModel correlation_matrix(const GrowthPanel& gp) {
  return correlation_matrix(gp.rates_norm, gp.goods);
}

RmtParams rmt_params_from_q(double q, double sigma) {
  if (!(q > 0.0) || !(sigma > 0.0)) throw InputError("RMT parameters need Q > 0 and sigma > 0");
  RmtParams p;
  p.sigma = sigma;
  p.q = q;
  const double root = std::sqrt(q);
  p.lambda_plus = sigma * sigma * (1.0 + root) * (1.0 + root) / q;
  p.lambda_minus = sigma * sigma * (1.0 - root) * (1.0 - root) / q;
  return p;
}

RmtParams rmt_params(Eigen::Index n_prime, Eigen::Index n_series, double sigma) {
  if (n_prime <= 0 || n_series <= 0) throw InputError("RMT parameters need positive dimensions");
  return rmt_params_from_q(static_cast<double>(n_prime) / static_cast<double>(n_series), sigma);
}

double mp_density(double lambda, const RmtParams& p) {
  if (!(lambda > p.lambda_minus && lambda < p.lambda_plus)) return 0.0;
  return p.q / (2.0 * std::numbers::pi * p.sigma * p.sigma) *
         std::sqrt((p.lambda_plus - lambda) * (lambda - p.lambda_minus)) / lambda;
}

double semicircle_density(double lambda, double sigma) {
  if (!(sigma > 0.0)) throw InputError("semicircle density needs sigma > 0");
  const double r2 = 4.0 * sigma * sigma - lambda * lambda;
  if (r2 < 0.0) return 0.0;
  return std::sqrt(r2) / (2.0 * std::numbers::pi * sigma * sigma);
}

SignificanceReport classify_significance(const CorrelationModel& model, const RmtParams& params,
                                         Eigen::Index density_points) {
  SignificanceReport report;
  report.params = params;
  const auto& ev = model.eigenvalues();
  for (Eigen::Index n = 0; n < ev.size(); ++n) {
    ModeSignificance m;
    m.mode = n + 1;
    m.eigenvalue = ev(n);
    m.margin = ev(n) - params.lambda_plus;
    m.significant = m.margin > 0.0;
    if (m.significant) report.significant_modes.push_back(m.mode);
    report.modes.push_back(m);
  }
  if (density_points >= 2) {
    const double lo = params.lambda_minus;
    const double hi = params.lambda_plus;
    for (Eigen::Index i = 0; i < density_points; ++i) {
      const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(density_points - 1);
      report.density_curve.emplace_back(x, mp_density(x, params));
    }
  }
  return report;
}

Eigen::MatrixXd rotate_rows(const Eigen::MatrixXd& w, const std::vector<Eigen::Index>& offsets) {
  const auto n = w.cols();
  Eigen::MatrixXd out(w.rows(), n);
  for (Eigen::Index s = 0; s < w.rows(); ++s) {
    const auto tau = offsets[static_cast<std::size_t>(s)] % n;
    for (Eigen::Index j = 0; j < n; ++j) out(s, j) = w(s, ((j - tau) % n + n) % n);
  }
  return out;
}

SignificanceReport rotation_null(const GrowthPanel& gp, Eigen::Index trials, std::uint64_t seed,
                                 const RotationOptions& opts) {
  if (trials < 1) throw InputError("rotation null needs at least one trial");
  if (!(opts.bin_width > 0.0)) throw InputError("rotation null bin width must be positive");

  const auto model = correlation_matrix(gp);
  auto report = classify_significance(model, rmt_params(gp.n_prime(), gp.n_series()));

  const auto m = gp.n_series();
  const auto n_prime = gp.n_prime();
  std::vector<Eigen::VectorXd> eigenvalues(static_cast<std::size_t>(trials));
  JacobiOptions jopts;
  jopts.compute_vectors = false;

  parallel_for(static_cast<std::size_t>(trials), opts.threads, [&](std::size_t t) {
    RngStream rng(seed, t);
    std::vector<Eigen::Index> offsets(static_cast<std::size_t>(m), 0);
    if (!opts.zero_shift) {
      for (auto& tau : offsets)
        tau = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n_prime)));
    }
    eigenvalues[t] = eig_symmetric(correlation_of(rotate_rows(gp.rates_norm, offsets)), jopts).eigenvalues;
  });

  NullDistribution null;
  null.trials = trials;
  null.bin_width = opts.bin_width;
  double max_lambda = 0.0;
  for (const auto& ev : eigenvalues) {
    null.largest_samples.push_back(ev(0));
    null.second_samples.push_back(ev.size() > 1 ? ev(1) : ev(0));
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      null.pooled.push_back(ev(i));
      max_lambda = std::max(max_lambda, ev(i));
    }
  }
  const auto bins = static_cast<std::size_t>(std::floor(max_lambda / opts.bin_width)) + 1;
  std::vector<double> counts(bins, 0.0);
  for (double x : null.pooled) {
    const auto b = static_cast<std::size_t>(std::max(0.0, std::floor(x / opts.bin_width)));
    counts[std::min(b, bins - 1)] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(null.pooled.size()) * opts.bin_width);
  for (std::size_t b = 0; b < bins; ++b) {
    null.bin_centers.push_back((static_cast<double>(b) + 0.5) * opts.bin_width);
    null.density.push_back(counts[b] * norm);
  }
  if (trials >= 2) {
    null.largest = summary_stats(null.largest_samples, 0.95);
    null.second = summary_stats(null.second_samples, 0.95);
  } else {
    null.largest = {null.largest_samples[0], 0.0, null.largest_samples[0], null.largest_samples[0]};
    null.second = {null.second_samples[0], 0.0, null.second_samples[0], null.second_samples[0]};
  }
  null.largest_p999 = quantile(null.largest_samples, 0.999);
  report.null_distribution = std::move(null);
  return report;
}

}  // namespace bcycle
