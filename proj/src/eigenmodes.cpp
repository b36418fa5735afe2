#include "bcycle/eigenmodes.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bcycle/error.hpp"

namespace bcycle {

Eigen::MatrixXd project_onto(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& w) {
  if (basis.rows() != w.rows()) throw InputError("projection basis does not match panel size");
  Eigen::MatrixXd out(basis.cols(), w.cols());
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index n = 0; n < basis.cols(); ++n) {
      double acc = 0.0;
      for (Eigen::Index s = 0; s < w.rows(); ++s) acc += basis(s, n) * w(s, j);
      out(n, j) = acc;
    }
  }
  return out;
}

ModeDecomposition project_modes(const GrowthPanel& gp, const CorrelationModel& model) {
  if (gp.n_series() != model.n_series() || gp.goods != model.goods) {
    throw InputError("growth panel labelling does not match the correlation model");
  }
  ModeDecomposition md;
  md.eigenvectors = model.eigenvectors();
  md.eigenvalues = model.eigenvalues();
  md.goods = gp.goods;
  md.coefficients = project_onto(md.eigenvectors, gp.rates_norm);
  md.fourier = dft_rows(md.coefficients);
  md.mode_power = md.fourier.cwiseAbs2();
  return md;
}

const Eigen::MatrixXd& mode_power_spectrum(const ModeDecomposition& md) { return md.mode_power; }

std::vector<double> default_period_bins(Eigen::Index n_prime) {
  const double n = static_cast<double>(n_prime);
  std::vector<double> edges;  // built descending
  edges.push_back(n);
  const Eigen::Index k_fine = std::min<Eigen::Index>(12, n_prime / 2);
  for (Eigen::Index k = 1; k <= k_fine; ++k) {
    const double edge = n / (static_cast<double>(k) + 0.5);
    if (edge > 2.0) edges.push_back(edge);
  }
  while (edges.back() / 1.25 > 2.0) edges.push_back(edges.back() / 1.25);
  edges.push_back(2.0);
  std::reverse(edges.begin(), edges.end());
  return edges;
}

std::vector<PeriodBin> binned_relative_contribution(const ModeDecomposition& md,
                                                    const std::vector<double>& edges) {
  const auto n_prime = md.n_prime();
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) || edges.front() > 2.0 ||
      edges.back() < static_cast<double>(n_prime)) {
    throw InputError("period bins must be ascending and cover (2, N']");
  }
  const Eigen::VectorXd total = md.mode_power.colwise().sum().transpose();  // M p(w_k)
  std::vector<PeriodBin> bins;
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    PeriodBin bin;
    bin.lo = edges[b];
    bin.hi = edges[b + 1];
    double num1 = 0.0, num2 = 0.0, den = 0.0;
    for (Eigen::Index k = 1; 2 * k <= n_prime; ++k) {
      const double period = static_cast<double>(n_prime) / static_cast<double>(k);
      const bool inside = (period > bin.lo || (b == 0 && period >= bin.lo)) && period <= bin.hi;
      if (!inside) continue;
      ++bin.count;
      num1 += md.mode_power(0, k);
      if (md.n_modes() > 1) num2 += md.mode_power(1, k);
      den += total(k);
    }
    if (bin.count > 0 && den > 0.0) {
      bin.mode1 = num1 / den;
      bin.mode2 = num2 / den;
      bin.both = (num1 + num2) / den;
    }
    bins.push_back(bin);
  }
  return bins;
}

Eigen::Index CycleReconstruction::wavenumber_column(Eigen::Index k) const {
  const auto it = std::find(wavenumbers.begin(), wavenumbers.end(), k);
  return it == wavenumbers.end() ? -1 : static_cast<Eigen::Index>(it - wavenumbers.begin());
}

std::vector<Eigen::Index> all_modes(const ModeDecomposition& md) {
  std::vector<Eigen::Index> modes;
  for (Eigen::Index n = 1; n <= md.n_modes(); ++n) modes.push_back(n);
  return modes;
}

std::vector<Eigen::Index> all_wavenumbers(Eigen::Index n_prime) {
  std::vector<Eigen::Index> ks;
  for (Eigen::Index k = 1; 2 * k <= n_prime; ++k) ks.push_back(k);
  return ks;
}

CycleReconstruction reconstruct_cycles(const ModeDecomposition& md,
                                       const std::vector<Eigen::Index>& modes,
                                       const std::vector<Eigen::Index>& wavenumbers) {
  const auto n_prime = md.n_prime();
  const auto G = md.n_goods();
  if (modes.empty() || wavenumbers.empty()) {
    throw InputError("cycle reconstruction needs at least one mode and one wavenumber");
  }
  for (auto n : modes) {
    if (n < 1 || n > md.n_modes()) throw InputError("mode index " + std::to_string(n) + " out of range");
  }
  for (auto k : wavenumbers) {
    if (k == 0) throw InputError("wavenumber 0 is excluded from cycle reconstruction");
    if (k < 0 || 2 * k > n_prime) {
      throw InputError("wavenumber " + std::to_string(k) + " outside 1.." + std::to_string(n_prime / 2));
    }
  }
  if (std::set<Eigen::Index>(modes.begin(), modes.end()).size() != modes.size() ||
      std::set<Eigen::Index>(wavenumbers.begin(), wavenumbers.end()).size() != wavenumbers.size()) {
    throw InputError("duplicate mode or wavenumber in cycle reconstruction");
  }

  CycleReconstruction cr;
  cr.modes = modes;
  cr.wavenumbers = wavenumbers;
  cr.n_prime = n_prime;
  cr.n_goods = G;

  const double scale = 1.0 / std::sqrt(static_cast<double>(n_prime));
  const auto table = detail::twiddle_table<double>(n_prime);

  // Real-valued time course of each selected mode restricted to the wavenumbers:
  // 2/sqrt(N') Re(a~_n(w_k) exp(-i w_k t_j)), the Nyquist term counted once.
  Eigen::MatrixXd mode_series = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(modes.size()), n_prime);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto n = modes[i] - 1;
    for (auto k : wavenumbers) {
      const double factor = (2 * k == n_prime) ? scale : 2.0 * scale;
      const auto coeff = md.fourier(n, k);
      for (Eigen::Index j = 0; j < n_prime; ++j) {
        const auto phase = std::conj(table((k * (j + 1)) % n_prime));
        mode_series(static_cast<Eigen::Index>(i), j) += factor * (coeff * phase).real();
      }
    }
  }

  const auto M = md.eigenvectors.rows();
  cr.series = Eigen::MatrixXd::Zero(M, n_prime);
  cr.averaged = Eigen::MatrixXd::Zero(kNumVariables, n_prime);
  cr.mean_components.resize(kNumVariables, static_cast<Eigen::Index>(modes.size()));
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto v = md.eigenvectors.col(modes[i] - 1);
    const auto row = mode_series.row(static_cast<Eigen::Index>(i));
    cr.series += v * row;
    Eigen::MatrixXd avg(kNumVariables, n_prime);
    for (Eigen::Index a = 0; a < kNumVariables; ++a) {
      const double vbar = v.segment(a * G, G).mean();
      cr.mean_components(a, static_cast<Eigen::Index>(i)) = vbar;
      avg.row(a) = vbar * row;
    }
    cr.averaged += avg;
    cr.averaged_by_mode.push_back(std::move(avg));
  }

  cr.amplitudes = ComplexMatrix<double>::Zero(kNumVariables, static_cast<Eigen::Index>(wavenumbers.size()));
  for (std::size_t c = 0; c < wavenumbers.size(); ++c) {
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const auto coeff = md.fourier(modes[i] - 1, wavenumbers[c]);
      for (Eigen::Index a = 0; a < kNumVariables; ++a) {
        cr.amplitudes(a, static_cast<Eigen::Index>(c)) +=
            coeff * cr.mean_components(a, static_cast<Eigen::Index>(i));
      }
    }
  }
  return cr;
}

}  // namespace bcycle
