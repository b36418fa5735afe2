// Writes a synthetic level panel in the long CSV format.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "bcycle/error.hpp"
#include "bcycle/panel.hpp"
#include "bcycle/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic production/shipment/inventory panel"};
  bcycle::SyntheticOptions opts;
  std::uint64_t seed = 1;
  std::string out = "-";
  std::string start = opts.start.str();
  app.add_option("--seed", seed, "seed");
  app.add_option("--goods", opts.n_goods, "number of goods");
  app.add_option("--months", opts.n_months, "number of level months");
  app.add_option("--start", start, "first month, YYYY-MM");
  app.add_option("--shipment-lead", opts.shipment_lead, "months production follows shipments");
  app.add_option("--inventory-lag", opts.inventory_lag, "months inventory follows production");
  app.add_option("--cycle-strength", opts.cycle_strength, "loading of the common cycle");
  app.add_option("-o,--output", out, "output file, '-' for stdout");
  CLI11_PARSE(app, argc, argv);
  try {
    opts.start = bcycle::YearMonth::parse(start);
    const auto panel = bcycle::synthetic_panel(seed, opts);
    if (out == "-") {
      bcycle::write_panel(std::cout, panel);
    } else {
      bcycle::save_panel(out, panel);
    }
  } catch (const bcycle::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
