// Command-line front end: bcycle <stage> [options]

#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "bcycle/error.hpp"
#include "bcycle/pipeline.hpp"

namespace {

using bcycle::RunConfig;
using bcycle::Stage;

int exit_code(const bcycle::Error& e) {
  switch (e.kind()) {
    case bcycle::ErrorKind::input: return 2;
    case bcycle::ErrorKind::numerical: return 3;
    case bcycle::ErrorKind::simulation: return 4;
  }
  return 1;
}

/// Options given on the command line override the config file, which
/// overrides the environment, which overrides the built-in defaults.
class Overrides {
 public:
  template <typename T>
  CLI::Option* add(CLI::App& app, const std::string& name, T RunConfig::*field,
                   const std::string& help) {
    auto value = std::make_shared<T>();
    auto* opt = app.add_option(name, *value, help);
    setters_.emplace_back(opt, [value, field](RunConfig& c) { c.*field = *value; });
    return opt;
  }

  CLI::Option* add_flag(CLI::App& app, const std::string& name, bool RunConfig::*field,
                        const std::string& help) {
    auto value = std::make_shared<bool>(false);
    auto* opt = app.add_flag(name, *value, help);
    setters_.emplace_back(opt, [value, field](RunConfig& c) { c.*field = *value; });
    return opt;
  }

  void add_modes(CLI::App& app) {
    auto value = std::make_shared<std::vector<std::string>>();
    auto* opt = app.add_option("--modes", *value, "modes to reconstruct, e.g. 1,2 or 'all'")->delimiter(',');
    setters_.emplace_back(opt, [value](RunConfig& c) {
      c.modes.clear();
      if (value->size() == 1 && value->front() == "all") return;
      for (const auto& s : *value) {
        try {
          c.modes.push_back(std::stol(s));
        } catch (const std::exception&) {
          throw bcycle::InputError("--modes expects integers or 'all', got '" + s + "'");
        }
      }
    });
  }

  void apply(RunConfig& config) const {
    for (const auto& [opt, set] : setters_)
      if (opt->count() > 0) set(config);
  }

 private:
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral and factor analysis of monthly production, shipment and inventory panels"};
  app.require_subcommand(1);
  app.fallthrough();

  std::vector<std::pair<CLI::App*, std::vector<Stage>>> commands;
  auto add_command = [&](const std::string& name, const std::string& help, std::vector<Stage> stages) {
    commands.emplace_back(app.add_subcommand(name, help), std::move(stages));
  };
  add_command("ingest", "validate the panel, emit growth rates and autocorrelations", {Stage::ingest});
  add_command("spectrum", "averaged, chopped and continuous power spectra", {Stage::spectrum});
  add_command("factors", "correlation eigenmodes, RMT bounds and the rotation null", {Stage::factors});
  add_command("modes", "mode coefficients, mode spectra, binned shares and cycle reconstruction", {Stage::modes});
  add_command("leadlag", "phase delays and the residual-reshuffle test", {Stage::leadlag});
  add_command("xspec", "smoothed cross-spectra, coherency and phase delays", {Stage::xspec});
  add_command("oos", "out-of-sample volatility decomposition", {Stage::oos});
  add_command("all", "run every stage and write summary.json", bcycle::all_stages());

  std::string config_path;
  bool print_config = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_flag("--print-config", print_config, "print the effective config and exit");

  Overrides o;
  o.add(app, "--panel", &RunConfig::panel, "level panel CSV (date,variable,good,value)");
  o.add(app, "--goods", &RunConfig::goods, "goods table CSV (id,label,category)");
  o.add_flag(app, "--iip-goods", &RunConfig::iip_goods, "use the built-in 21-goods table");
  o.add(app, "--aux", &RunConfig::aux, "auxiliary monthly series for the overlay (date,value)");
  o.add(app, "--in-sample-end", &RunConfig::in_sample_end, "last in-sample month, YYYY-MM");
  o.add_flag(app, "--interpolate-gaps", &RunConfig::interpolate_gaps, "fill short interior gaps linearly");
  o.add(app, "--max-gap", &RunConfig::max_gap, "longest gap filled, months");
  o.add(app, "--seasonally-adjusted", &RunConfig::seasonally_adjusted, "input is seasonally adjusted (true/false)");
  o.add(app, "--seed", &RunConfig::seed, "master seed");
  o.add(app, "--trials", &RunConfig::trials, "reshuffle trials (0 skips)");
  o.add(app, "--rotation-trials", &RunConfig::rotation_trials, "rotation-null trials (0 skips)");
  o.add(app, "--threads", &RunConfig::threads, "worker threads, 0 = all cores");
  o.add(app, "--chops", &RunConfig::chops, "prefix lengths for chopped spectra")->delimiter(',');
  o.add(app, "--t-min", &RunConfig::t_min, "continuous spectrum: shortest period");
  o.add(app, "--t-max", &RunConfig::t_max, "continuous spectrum: longest period");
  o.add(app, "--t-step", &RunConfig::t_step, "continuous spectrum: period step");
  o.add(app, "--min-cycles", &RunConfig::min_cycles, "peaks below this many cycles are one-time events");
  o.add(app, "--min-prominence", &RunConfig::min_prominence, "minimum peak prominence");
  o.add(app, "--spectrum-scale", &RunConfig::spectrum_scale, "multiplier applied to emitted spectra");
  o.add(app, "--autocorr-lags", &RunConfig::autocorr_lags, "largest autocorrelation lag");
  o.add(app, "--bin-width", &RunConfig::bin_width, "null eigenvalue histogram bin width");
  o.add_modes(app);
  o.add(app, "--wavenumbers", &RunConfig::wavenumbers, "wavenumbers k for cycles and delays")->delimiter(',');
  o.add_flag(app, "--freeze-eigenvectors", &RunConfig::freeze_eigenvectors,
             "report delays from the original eigenvectors as primary");
  o.add(app, "--acceptance", &RunConfig::acceptance, "reshuffle trial acceptance: top_two | top_two_overlap");
  o.add(app, "--overlap-threshold", &RunConfig::overlap_threshold, "eigenvector overlap for top_two_overlap");
  o.add_flag(app, "--keep-null-samples", &RunConfig::keep_null_samples, "write lag_null_samples.csv");
  o.add(app, "--kernel-span", &RunConfig::kernel_span, "modified Daniell span (odd)");
  o.add(app, "--alignment-sp", &RunConfig::alignment_sp, "shipment-production alignment shift, months");
  o.add(app, "--alignment-pi", &RunConfig::alignment_pi, "production-inventory alignment shift, months");
  o.add(app, "--smoothing-edge", &RunConfig::smoothing_edge, "circular | truncate");
  o.add(app, "--oos-normalization", &RunConfig::oos_normalization, "frozen | extended");
  o.add(app, "-o,--output-dir", &RunConfig::output_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config;
    if (const char* dir = std::getenv(bcycle::kOutputDirEnv); dir != nullptr && *dir != '\0')
      config.output_dir = dir;
    if (!config_path.empty()) config = bcycle::load_config(config_path, config);
    o.apply(config);
    if (print_config) {
      std::cout << bcycle::to_json(config).dump(2) << "\n";
      return 0;
    }

    bcycle::Pipeline pipeline(config);
    for (const auto& [cmd, stages] : commands) {
      if (!cmd->parsed()) continue;
      if (stages.size() > 1) {
        (void)pipeline.run_all();
      } else {
        (void)pipeline.run(stages.front());
      }
    }
    for (const auto& f : pipeline.written()) std::cout << config.output_dir << "/" << f << "\n";
  } catch (const bcycle::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
