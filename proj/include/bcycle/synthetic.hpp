#pragma once

// Synthetic level panels with a planted business-cycle structure, for demos
// and end-to-end tests.

#include <Eigen/Dense>

#include <cstdint>

#include "bcycle/panel.hpp"

namespace bcycle {

struct SyntheticOptions {
  Eigen::Index n_goods = 21;
  Eigen::Index n_months = 240;  // level months
  YearMonth start{1988, 1};
  /// Production follows shipments by this many months; inventory follows
  /// production by `inventory_lag` months.
  Eigen::Index shipment_lead = 4;
  Eigen::Index inventory_lag = 10;
  double cycle_strength = 0.6;  // loading of the common driver
  double ar = 0.9;              // AR(1) coefficient of the common driver
  double growth_scale = 0.01;   // log10 units per month
};

/// Every growth series is a loading times a lagged common AR(1) driver plus
/// idiosyncratic noise; levels start at 100.
[[nodiscard]] Panel synthetic_panel(std::uint64_t seed, const SyntheticOptions& opts = {});

}  // namespace bcycle
