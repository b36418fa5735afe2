#pragma once

// Batch orchestration: run configuration, stage execution and report files.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bcycle/cross_spectrum.hpp"
#include "bcycle/eigenmodes.hpp"
#include "bcycle/factor_rmt.hpp"
#include "bcycle/growth.hpp"
#include "bcycle/leadlag.hpp"
#include "bcycle/out_of_sample.hpp"
#include "bcycle/panel.hpp"

namespace bcycle {

inline constexpr std::string_view kToolName = "bcycle";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kSummarySchemaVersion = 1;
/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "BCYCLE_OUTPUT_DIR";

struct RunConfig {
  // Inputs
  std::string panel;           // long-format level CSV
  std::string goods;           // optional goods table CSV
  bool iip_goods = false;      // use the built-in 21-goods table
  std::string aux;             // optional `date,value` series for the overlay
  std::string in_sample_end;   // YYYY-MM; empty = last month of the panel
  bool interpolate_gaps = false;
  int max_gap = 2;
  bool seasonally_adjusted = true;

  // Simulation
  std::uint64_t seed = 1;
  Eigen::Index trials = 1000;           // reshuffle trials
  Eigen::Index rotation_trials = 1000;  // rotation-null trials
  unsigned threads = 0;                 // 0 = hardware concurrency

  // Spectra
  std::vector<Eigen::Index> chops;  // empty = 234, 229, ..., 164 (clipped to the panel)
  double t_min = 24.0;
  double t_max = 120.0;
  double t_step = 0.01;
  double min_cycles = 3.0;
  double min_prominence = 0.0;
  double spectrum_scale = 1.0;  // plain multiplier on emitted spectra
  Eigen::Index autocorr_lags = 36;

  // Factors and modes
  double bin_width = 0.02;
  std::vector<Eigen::Index> modes{1, 2};  // empty = all modes
  std::vector<Eigen::Index> wavenumbers{4, 6};

  // Lead-lag
  bool freeze_eigenvectors = false;
  std::string acceptance = "top_two";  // top_two | top_two_overlap
  double overlap_threshold = 0.8;
  bool keep_null_samples = false;

  // Cross-spectrum
  Eigen::Index kernel_span = 11;
  Eigen::Index alignment_sp = 0;
  Eigen::Index alignment_pi = 8;
  std::string smoothing_edge = "circular";  // circular | truncate

  // Out-of-sample
  std::string oos_normalization = "frozen";  // frozen | extended

  std::string output_dir = "bcycle-out";

  /// Throws InputError on inconsistent settings.
  void validate() const;
};

[[nodiscard]] nlohmann::ordered_json to_json(const RunConfig& config);
/// Unknown keys are rejected; missing keys keep their defaults.
[[nodiscard]] RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

[[nodiscard]] std::string sha256_hex(std::string_view bytes);
[[nodiscard]] std::string file_sha256(const std::filesystem::path& path);
/// SHA-256 of the compact JSON serialization of the config.
[[nodiscard]] std::string config_hash(const RunConfig& config);

/// Writes `contents` to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Rounds to `digits` significant digits; non-finite values pass through.
[[nodiscard]] double round_significant(double value, int digits = 4);

enum class Stage { ingest, spectrum, factors, modes, leadlag, xspec, oos };

[[nodiscard]] std::string_view to_string(Stage stage);
[[nodiscard]] std::vector<Stage> all_stages();

/// Runs stages against one configuration. Every stage re-derives what it
/// needs from the input panel, so each can run on its own; results shared
/// between stages are cached within one Pipeline object.
class Pipeline {
 public:
  explicit Pipeline(RunConfig config);

  [[nodiscard]] const RunConfig& config() const { return config_; }

  /// Runs one stage, writes its files and returns its summary fragment.
  nlohmann::ordered_json run(Stage stage);
  /// Runs every stage and writes summary.json.
  nlohmann::ordered_json run_all();

  /// Files written so far (relative to the output directory).
  [[nodiscard]] const std::vector<std::string>& written() const { return written_; }

 private:
  nlohmann::ordered_json run_stage(Stage stage);
  nlohmann::ordered_json stage_ingest();
  nlohmann::ordered_json stage_spectrum();
  nlohmann::ordered_json stage_factors();
  nlohmann::ordered_json stage_modes();
  nlohmann::ordered_json stage_leadlag();
  nlohmann::ordered_json stage_xspec();
  nlohmann::ordered_json stage_oos();

  const Panel& full_panel();
  const Panel& in_sample_panel();
  const GrowthPanel& growth();
  const CorrelationModel& model();
  const ModeDecomposition& decomposition();
  [[nodiscard]] std::vector<Eigen::Index> selected_modes();

  nlohmann::ordered_json metadata() const;
  std::vector<std::string> header_lines(const std::vector<std::string>& notes) const;
  void emit_csv(const std::string& name, const std::string& body,
                const std::vector<std::string>& notes = {});
  void emit_json(const std::string& name, nlohmann::ordered_json body);

  RunConfig config_;
  std::string config_hash_;
  nlohmann::ordered_json inputs_;
  std::vector<std::string> written_;

  std::optional<Panel> full_;
  std::optional<Panel> in_sample_;
  std::optional<GrowthPanel> growth_;
  std::optional<CorrelationModel> model_;
  std::optional<ModeDecomposition> md_;
};

}  // namespace bcycle
