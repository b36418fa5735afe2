#include "bcycle/leadlag.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bcycle/error.hpp"
#include "bcycle/fourier.hpp"
#include "bcycle/parallel.hpp"
#include "bcycle/rng.hpp"

namespace bcycle {

namespace {

char variable_letter(Variable v) {
  switch (v) {
    case Variable::production: return 'P';
    case Variable::shipment: return 'S';
    case Variable::inventory: return 'I';
  }
  return '?';
}

struct DelaySpec {
  VariablePair pair;
  Eigen::Index k;
};

// Delays of the two-mode reconstruction of `normalized` on `basis` (M x 2).
std::vector<double> two_mode_delays(const Eigen::MatrixXd& normalized, const Eigen::MatrixXd& basis,
                                    Eigen::Index n_goods, const std::vector<DelaySpec>& specs,
                                    const ComplexSeries<double>& table) {
  const auto n_prime = normalized.cols();
  const Eigen::MatrixXd coeffs = project_onto(basis, normalized);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_prime));
  Eigen::MatrixXd vbar(kNumVariables, basis.cols());
  for (Eigen::Index a = 0; a < kNumVariables; ++a)
    for (Eigen::Index n = 0; n < basis.cols(); ++n)
      vbar(a, n) = basis.col(n).segment(a * n_goods, n_goods).mean();

  std::vector<double> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    std::complex<double> amp[kNumVariables] = {};
    for (Eigen::Index n = 0; n < coeffs.rows(); ++n) {
      std::complex<double> ak(0.0);
      for (Eigen::Index j = 0; j < n_prime; ++j) ak += coeffs(n, j) * table((spec.k * (j + 1)) % n_prime);
      ak *= scale;
      for (Eigen::Index a = 0; a < kNumVariables; ++a) amp[a] += ak * vbar(a, n);
    }
    out.push_back(delay_from_amplitudes(amp[static_cast<int>(spec.pair.leader)],
                                        amp[static_cast<int>(spec.pair.follower)], n_prime,
                                        spec.k));
  }
  return out;
}

void normalize_rows(Eigen::MatrixXd& x) {
  const double n = static_cast<double>(x.cols());
  for (Eigen::Index s = 0; s < x.rows(); ++s) {
    const double mean = x.row(s).sum() / n;
    x.row(s).array() -= mean;
    const double sd = std::sqrt(x.row(s).squaredNorm() / n);
    if (!(sd > 0.0)) throw NumericalError("simulated series " + std::to_string(s) + " has zero variance");
    x.row(s) /= sd;
  }
}

struct TrialResult {
  bool accepted = false;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<double> reestimated;
  std::vector<double> frozen;
};

}  // namespace

std::string VariablePair::code() const {
  return std::string{variable_letter(leader), variable_letter(follower)};
}

std::string lag_name(VariablePair pair, Eigen::Index n_prime, Eigen::Index k) {
  return pair.code() + "_" +
         std::to_string(std::lround(static_cast<double>(n_prime) / static_cast<double>(k)));
}

double delay_from_amplitudes(std::complex<double> leader, std::complex<double> follower,
                             Eigen::Index n_prime, Eigen::Index k) {
  if (std::abs(leader) < 1e-12 || std::abs(follower) < 1e-12) {
    throw NumericalError("phase undefined: amplitude below 1e-12 at wavenumber " + std::to_string(k));
  }
  const double period = static_cast<double>(n_prime) / static_cast<double>(k);
  return period / (2.0 * std::numbers::pi) * principal_arg(follower / leader);
}

LagEstimate phase_delay(const CycleReconstruction& cr, VariablePair pair, Eigen::Index k) {
  const auto col = cr.wavenumber_column(k);
  if (col < 0) throw InputError("wavenumber " + std::to_string(k) + " not present in reconstruction");
  LagEstimate est;
  est.pair = pair;
  est.k = k;
  est.period = static_cast<double>(cr.n_prime) / static_cast<double>(k);
  est.delta_months = delay_from_amplitudes(cr.amplitudes(static_cast<int>(pair.leader), col),
                                           cr.amplitudes(static_cast<int>(pair.follower), col),
                                           cr.n_prime, k);
  return est;
}

Eigen::MatrixXd residual_panel(const Eigen::MatrixXd& normalized, const Eigen::MatrixXd& eigenvectors,
                               Eigen::Index retained) {
  const Eigen::MatrixXd basis = eigenvectors.leftCols(retained);
  return normalized - basis * project_onto(basis, normalized);
}

MonteCarloLagSummary reshuffle_significance(const GrowthPanel& gp, const CorrelationModel& model,
                                            Eigen::Index trials, std::uint64_t seed,
                                            const ReshuffleOptions& opts) {
  if (trials < 100) throw InputError("reshuffle test needs at least 100 trials");
  if (model.n_series() != gp.n_series() || model.goods != gp.goods) {
    throw InputError("growth panel labelling does not match the correlation model");
  }
  if (model.n_series() < 2) throw InputError("reshuffle test needs at least two series");

  const auto n_prime = gp.n_prime();
  const auto G = gp.n_goods();
  const auto& w = gp.rates_norm;
  const Eigen::MatrixXd original = model.eigenvectors().leftCols(2);
  const Eigen::MatrixXd retained = original * project_onto(original, w);
  const Eigen::MatrixXd residual = w - retained;
  const double lambda_plus = rmt_params(n_prime, gp.n_series()).lambda_plus;
  const auto table = detail::twiddle_table<double>(n_prime);

  std::vector<DelaySpec> specs;
  for (auto pair : {kShipmentProduction, kProductionInventory})
    for (auto k : opts.wavenumbers) specs.push_back({pair, k});

  MonteCarloLagSummary summary;
  summary.seed = seed;
  summary.trials_requested = trials;
  summary.frozen_primary = opts.freeze_eigenvectors;

  const auto md = project_modes(gp, model);
  const auto cr = reconstruct_cycles(md, {1, 2}, opts.wavenumbers);
  for (const auto& spec : specs) {
    LagQuantity q;
    q.name = lag_name(spec.pair, n_prime, spec.k);
    q.pair = spec.pair;
    q.k = spec.k;
    q.observed = phase_delay(cr, spec.pair, spec.k).delta_months;
    summary.reestimated.push_back(q);
  }
  summary.frozen = summary.reestimated;

  JacobiOptions jopts;
  jopts.sign_block = G;
  std::vector<TrialResult> results(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), opts.threads, [&](std::size_t t) {
    RngStream rng(seed, t);
    Eigen::MatrixXd sim = residual;
    if (!opts.identity_permutation) {
      std::vector<double> row(static_cast<std::size_t>(n_prime));
      for (Eigen::Index s = 0; s < sim.rows(); ++s) {
        for (Eigen::Index j = 0; j < n_prime; ++j) row[static_cast<std::size_t>(j)] = sim(s, j);
        rng.shuffle(row.begin(), row.end());
        for (Eigen::Index j = 0; j < n_prime; ++j) sim(s, j) = row[static_cast<std::size_t>(j)];
      }
    }
    sim += retained;
    normalize_rows(sim);

    const auto eig = eig_symmetric(correlation_of(sim), jopts);
    TrialResult& r = results[t];
    r.lambda1 = eig.eigenvalues(0);
    r.lambda2 = eig.eigenvalues(1);
    if (!(r.lambda1 > lambda_plus && r.lambda2 > lambda_plus)) return;

    // Match simulated top-two eigenvectors to the originals by overlap.
    const Eigen::Matrix2d overlap = original.transpose() * eig.eigenvectors.leftCols(2);
    const bool swap = std::abs(overlap(0, 1)) + std::abs(overlap(1, 0)) >
                      std::abs(overlap(0, 0)) + std::abs(overlap(1, 1));
    Eigen::MatrixXd matched(gp.n_series(), 2);
    for (Eigen::Index n = 0; n < 2; ++n) {
      const Eigen::Index src = swap ? 1 - n : n;
      const double o = overlap(n, src);
      if (opts.rule == AcceptanceRule::top_two_above_bound_with_overlap &&
          std::abs(o) < opts.overlap_threshold) {
        return;
      }
      matched.col(n) = o < 0 ? Eigen::VectorXd(-eig.eigenvectors.col(src))
                             : Eigen::VectorXd(eig.eigenvectors.col(src));
    }
    r.accepted = true;
    r.reestimated = two_mode_delays(sim, matched, G, specs, table);
    r.frozen = two_mode_delays(sim, original, G, specs, table);
  });

  double max_lambda2 = -1.0;
  for (const auto& r : results) {
    max_lambda2 = std::max(max_lambda2, r.lambda2);
    if (!r.accepted) {
      ++summary.trials_rejected;
      continue;
    }
    ++summary.trials_used;
    for (std::size_t q = 0; q < specs.size(); ++q) {
      summary.reestimated[q].samples.push_back(r.reestimated[q]);
      summary.frozen[q].samples.push_back(r.frozen[q]);
    }
  }
  if (summary.trials_used == 0) {
    std::ostringstream os;
    os << "reshuffle test: none of " << trials
       << " trials kept two eigenvalues above lambda_+ = " << lambda_plus
       << " (largest second eigenvalue seen " << max_lambda2 << ")";
    throw SimulationError(os.str());
  }

  for (auto* set : {&summary.reestimated, &summary.frozen}) {
    for (auto& q : *set) {
      if (q.samples.size() >= 2) {
        q.null = summary_stats(q.samples, 0.95);
      } else {
        q.null = {q.samples[0], 0.0, q.samples[0], q.samples[0]};
      }
      if (!opts.keep_samples) {
        q.samples.clear();
        q.samples.shrink_to_fit();
      }
    }
  }
  return summary;
}

}  // namespace bcycle
