#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "bcycle/eigenmodes.hpp"
#include "bcycle/factor_rmt.hpp"
#include "bcycle/growth.hpp"
#include "bcycle/stats.hpp"

namespace bcycle {

/// `follower` lags `leader` by a positive delay.
struct VariablePair {
  Variable leader;
  Variable follower;

  [[nodiscard]] std::string code() const;  // "SP", "PI", ...
  [[nodiscard]] VariablePair reversed() const { return {follower, leader}; }
  bool operator==(const VariablePair&) const = default;
};

inline constexpr VariablePair kShipmentProduction{Variable::shipment, Variable::production};
inline constexpr VariablePair kProductionInventory{Variable::production, Variable::inventory};

/// "SP_60" style label: pair code and the period N'/k rounded to months.
[[nodiscard]] std::string lag_name(VariablePair pair, Eigen::Index n_prime, Eigen::Index k);

struct LagEstimate {
  VariablePair pair;
  Eigen::Index k = 0;
  double period = 0.0;        // N'/k months
  double delta_months = 0.0;  // in (-T/2, T/2]
};

/// Delay implied by two complex amplitudes at wavenumber k:
/// (N'/k) (1/2 pi) Arg[follower / leader].
[[nodiscard]] double delay_from_amplitudes(std::complex<double> leader,
                                           std::complex<double> follower, Eigen::Index n_prime,
                                           Eigen::Index k);

[[nodiscard]] LagEstimate phase_delay(const CycleReconstruction& cr, VariablePair pair,
                                      Eigen::Index k);

/// w' = w - sum_{n <= retained} a_n V^(n).
[[nodiscard]] Eigen::MatrixXd residual_panel(const Eigen::MatrixXd& normalized,
                                             const Eigen::MatrixXd& eigenvectors,
                                             Eigen::Index retained = 2);

enum class AcceptanceRule {
  /// Both of the two largest simulated eigenvalues exceed lambda_+.
  top_two_above_bound,
  /// Additionally |cos| >= overlap_threshold between matched simulated and
  /// original top-two eigenvectors.
  top_two_above_bound_with_overlap,
};

struct ReshuffleOptions {
  AcceptanceRule rule = AcceptanceRule::top_two_above_bound;
  double overlap_threshold = 0.8;
  /// Which delay set is primary; both are always computed.
  bool freeze_eigenvectors = false;
  std::vector<Eigen::Index> wavenumbers{4, 6};
  unsigned threads = 0;
  bool keep_samples = false;
  /// Test hook: permutations are the identity.
  bool identity_permutation = false;
};

struct LagQuantity {
  std::string name;  // e.g. "SP_60"
  VariablePair pair;
  Eigen::Index k = 0;
  double observed = 0.0;
  SummaryStats null;
  std::vector<double> samples;  // accepted trials, trial order; kept on request
};

struct MonteCarloLagSummary {
  std::uint64_t seed = 0;
  Eigen::Index trials_requested = 0;
  Eigen::Index trials_used = 0;
  Eigen::Index trials_rejected = 0;
  bool frozen_primary = false;
  std::vector<LagQuantity> reestimated;  // eigenvectors re-derived per trial
  std::vector<LagQuantity> frozen;       // original eigenvectors reused

  [[nodiscard]] const std::vector<LagQuantity>& primary() const {
    return frozen_primary ? frozen : reestimated;
  }
  [[nodiscard]] double acceptance_rate() const {
    return trials_requested == 0 ? 0.0
                                 : static_cast<double>(trials_used) / static_cast<double>(trials_requested);
  }
};

/// Residual-reshuffle null for the two-mode delays. Trial t draws from
/// RngStream(seed, t); results are merged in trial order.
[[nodiscard]] MonteCarloLagSummary reshuffle_significance(const GrowthPanel& gp,
                                                          const CorrelationModel& model,
                                                          Eigen::Index trials, std::uint64_t seed,
                                                          const ReshuffleOptions& opts = {});

}  // namespace bcycle
