#include "bcycle/synthetic.hpp"

#include <cmath>
#include <string>

#include "bcycle/error.hpp"
#include "bcycle/rng.hpp"

namespace bcycle {

Panel synthetic_panel(std::uint64_t seed, const SyntheticOptions& opts) {
  if (opts.n_goods < 1 || opts.n_months < 3) throw InputError("synthetic panel is too small");
  const auto g = opts.n_goods;
  const auto n = opts.n_months - 1;
  const auto max_lag = opts.shipment_lead + opts.inventory_lag;
  RngStream rng(seed, 0);

  Eigen::VectorXd driver(n + max_lag);
  double x = 0.0;
  for (int burn = 0; burn < 500; ++burn) x = opts.ar * x + rng.normal();
  const double unit = std::sqrt(1.0 - opts.ar * opts.ar);
  for (Eigen::Index j = 0; j < driver.size(); ++j) {
    x = opts.ar * x + rng.normal();
    driver(j) = unit * x;
  }
  // driver(max_lag + j) is the shipment cycle at growth month j.
  auto cycle = [&](Eigen::Index j, Eigen::Index lag) { return driver(max_lag + j - lag); };

  Panel p;
  p.start = opts.start;
  for (Eigen::Index i = 1; i <= g; ++i)
    p.goods.push_back({static_cast<int>(i), "good " + std::to_string(i), ""});
  p.levels.resize(3 * g, opts.n_months);
  p.provenance.push_back("synthetic panel, seed " + std::to_string(seed));

  const double b = opts.cycle_strength;
  const double idio = std::sqrt(std::max(0.0, 1.0 - b * b));
  for (Eigen::Index v = 0; v < 3; ++v) {
    const Eigen::Index lag = v == 1 ? 0 : v == 0 ? opts.shipment_lead : max_lag;
    for (Eigen::Index k = 0; k < g; ++k) {
      const Eigen::Index s = v * g + k;
      const double loading = b * (0.7 + 0.6 * rng.uniform());
      double log_level = 2.0;
      double prev = 0.0;
      p.levels(s, 0) = 100.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        // Idiosyncratic growth is mildly anti-persistent.
        const double e = idio * rng.normal();
        const double r = loading * cycle(j, lag) + e - 0.3 * prev;
        prev = e;
        log_level += opts.growth_scale * r;
        p.levels(s, j + 1) = std::pow(10.0, log_level);
      }
    }
  }
  return p;
}

}  // namespace bcycle
