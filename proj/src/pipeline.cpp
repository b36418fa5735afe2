#include "bcycle/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "bcycle/csv.hpp"
#include "bcycle/error.hpp"
#include "bcycle/spectrum.hpp"

namespace bcycle {

using json = nlohmann::ordered_json;
using Eigen::Index;

namespace {

std::string num(double v) { return csv::format_double(v); }

std::string variable_name(Index row, Index n_goods) {
  return std::string(to_string(kVariables[static_cast<std::size_t>(row / n_goods)]));
}

/// JSON number, or null when not finite.
json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json stats_json(const SummaryStats& s) {
  return json{{"mean", jnum(s.mean)}, {"std", jnum(s.std)}, {"ci_low", jnum(s.ci_low)},
              {"ci_high", jnum(s.ci_high)}};
}

void round_numbers(json& j, int digits) {
  if (j.is_number_float()) {
    j = round_significant(j.get<double>(), digits);
  } else if (j.is_structured()) {
    for (auto& child : j) round_numbers(child, digits);
  }
}

EdgeMode parse_edge(const std::string& s) {
  if (s == "circular") return EdgeMode::circular;
  if (s == "truncate") return EdgeMode::truncate;
  throw InputError("smoothing_edge must be 'circular' or 'truncate', got '" + s + "'");
}

AcceptanceRule parse_acceptance(const std::string& s) {
  if (s == "top_two") return AcceptanceRule::top_two_above_bound;
  if (s == "top_two_overlap") return AcceptanceRule::top_two_above_bound_with_overlap;
  throw InputError("acceptance must be 'top_two' or 'top_two_overlap', got '" + s + "'");
}

[[noreturn]] void rethrow_in_stage(const Error& e, Stage stage) {
  const std::string msg = "stage '" + std::string(to_string(stage)) + "': " + e.what();
  switch (e.kind()) {
    case ErrorKind::numerical:
      throw NumericalError(msg);
    case ErrorKind::simulation:
      throw SimulationError(msg);
    case ErrorKind::input:
      break;
  }
  throw InputError(msg);
}

std::vector<Index> two_modes() { return {1, 2}; }

}  // namespace

void RunConfig::validate() const {
  if (panel.empty()) throw InputError("no input panel given");
  if (!goods.empty() && iip_goods) throw InputError("give either a goods table or iip_goods, not both");
  if (!in_sample_end.empty()) (void)YearMonth::parse(in_sample_end);
  if (max_gap < 1) throw InputError("max_gap must be at least 1");
  if (trials != 0 && trials < 100) throw InputError("trials must be 0 (skip) or at least 100");
  if (rotation_trials < 0) throw InputError("rotation_trials must be non-negative");
  for (auto c : chops)
    if (c < kMinChopMonths) throw InputError("chop lengths must be at least 24 months");
  if (!(t_min >= 2.0 && t_min < t_max && t_step > 0.0)) {
    throw InputError("continuous grid needs 2 <= t_min < t_max and step > 0");
  }
  if (!(spectrum_scale > 0.0)) throw InputError("spectrum_scale must be positive");
  if (autocorr_lags < 1) throw InputError("autocorr_lags must be positive");
  if (!(bin_width > 0.0)) throw InputError("bin_width must be positive");
  for (auto m : modes)
    if (m < 1) throw InputError("modes are numbered from 1");
  if (wavenumbers.empty()) throw InputError("at least one wavenumber is required");
  for (auto k : wavenumbers)
    if (k < 1) throw InputError("wavenumbers must be positive");
  (void)parse_acceptance(acceptance);
  (void)parse_edge(smoothing_edge);
  (void)parse_oos_normalization(oos_normalization);
  if (kernel_span < 3 || kernel_span % 2 == 0) throw InputError("kernel_span must be odd and >= 3");
  if (output_dir.empty()) throw InputError("output directory is empty");
}

json to_json(const RunConfig& c) {
  return json{
      {"panel", c.panel},
      {"goods", c.goods},
      {"iip_goods", c.iip_goods},
      {"aux", c.aux},
      {"in_sample_end", c.in_sample_end},
      {"interpolate_gaps", c.interpolate_gaps},
      {"max_gap", c.max_gap},
      {"seasonally_adjusted", c.seasonally_adjusted},
      {"seed", c.seed},
      {"trials", c.trials},
      {"rotation_trials", c.rotation_trials},
      {"threads", c.threads},
      {"chops", c.chops},
      {"t_min", c.t_min},
      {"t_max", c.t_max},
      {"t_step", c.t_step},
      {"min_cycles", c.min_cycles},
      {"min_prominence", c.min_prominence},
      {"spectrum_scale", c.spectrum_scale},
      {"autocorr_lags", c.autocorr_lags},
      {"bin_width", c.bin_width},
      {"modes", c.modes},
      {"wavenumbers", c.wavenumbers},
      {"freeze_eigenvectors", c.freeze_eigenvectors},
      {"acceptance", c.acceptance},
      {"overlap_threshold", c.overlap_threshold},
      {"keep_null_samples", c.keep_null_samples},
      {"kernel_span", c.kernel_span},
      {"alignment_sp", c.alignment_sp},
      {"alignment_pi", c.alignment_pi},
      {"smoothing_edge", c.smoothing_edge},
      {"oos_normalization", c.oos_normalization},
      {"output_dir", c.output_dir},
  };
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig c) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  const auto known = to_json(c);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw InputError("unknown config key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("panel", c.panel);
    get("goods", c.goods);
    get("iip_goods", c.iip_goods);
    get("aux", c.aux);
    get("in_sample_end", c.in_sample_end);
    get("interpolate_gaps", c.interpolate_gaps);
    get("max_gap", c.max_gap);
    get("seasonally_adjusted", c.seasonally_adjusted);
    get("seed", c.seed);
    get("trials", c.trials);
    get("rotation_trials", c.rotation_trials);
    get("threads", c.threads);
    get("chops", c.chops);
    get("t_min", c.t_min);
    get("t_max", c.t_max);
    get("t_step", c.t_step);
    get("min_cycles", c.min_cycles);
    get("min_prominence", c.min_prominence);
    get("spectrum_scale", c.spectrum_scale);
    get("autocorr_lags", c.autocorr_lags);
    get("bin_width", c.bin_width);
    get("modes", c.modes);
    get("wavenumbers", c.wavenumbers);
    get("freeze_eigenvectors", c.freeze_eigenvectors);
    get("acceptance", c.acceptance);
    get("overlap_threshold", c.overlap_threshold);
    get("keep_null_samples", c.keep_null_samples);
    get("kernel_span", c.kernel_span);
    get("alignment_sp", c.alignment_sp);
    get("alignment_pi", c.alignment_pi);
    get("smoothing_edge", c.smoothing_edge);
    get("oos_normalization", c.oos_normalization);
    get("output_dir", c.output_dir);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  try {
    return config_from_json(nlohmann::json::parse(in), std::move(base));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw InputError("SHA-256 computation failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

std::string config_hash(const RunConfig& config) { return sha256_hex(to_json(config).dump()); }

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw InputError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InputError("cannot move " + tmp.string() + " into place: " + ec.message());
}

double round_significant(double value, int digits) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return csv::parse_double(buf);
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::ingest: return "ingest";
    case Stage::spectrum: return "spectrum";
    case Stage::factors: return "factors";
    case Stage::modes: return "modes";
    case Stage::leadlag: return "leadlag";
    case Stage::xspec: return "xspec";
    case Stage::oos: return "oos";
  }
  return "unknown";
}

std::vector<Stage> all_stages() {
  return {Stage::ingest, Stage::spectrum, Stage::factors, Stage::modes,
          Stage::leadlag, Stage::xspec, Stage::oos};
}

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)) {
  config_.validate();
  config_hash_ = config_hash(config_);
  inputs_ = json::object();
  inputs_["panel"] = json{{"path", config_.panel}, {"sha256", file_sha256(config_.panel)}};
  if (!config_.goods.empty())
    inputs_["goods"] = json{{"path", config_.goods}, {"sha256", file_sha256(config_.goods)}};
  if (!config_.aux.empty())
    inputs_["aux"] = json{{"path", config_.aux}, {"sha256", file_sha256(config_.aux)}};
}

json Pipeline::metadata() const {
  return json{{"tool", kToolName},       {"version", kToolVersion},
              {"config_sha256", config_hash_}, {"seed", config_.seed},
              {"inputs", inputs_},       {"config", to_json(config_)}};
}

std::vector<std::string> Pipeline::header_lines(const std::vector<std::string>& notes) const {
  std::vector<std::string> lines{
      "tool: " + std::string(kToolName) + " " + std::string(kToolVersion),
      "config_sha256: " + config_hash_,
      "seed: " + std::to_string(config_.seed),
  };
  for (const auto& [name, input] : inputs_.items()) {
    lines.push_back("input " + name + ": " + input["path"].get<std::string>() +
                    " sha256=" + input["sha256"].get<std::string>());
  }
  lines.push_back("config: " + to_json(config_).dump());
  for (const auto& n : notes) lines.push_back(n);
  return lines;
}

void Pipeline::emit_csv(const std::string& name, const std::string& body,
                        const std::vector<std::string>& notes) {
  std::string text;
  for (const auto& line : header_lines(notes)) text += "# " + line + "\n";
  text += body;
  std::filesystem::create_directories(config_.output_dir);
  write_file_atomic(std::filesystem::path(config_.output_dir) / name, text);
  written_.push_back(name);
}

void Pipeline::emit_json(const std::string& name, json body) {
  json doc;
  doc["metadata"] = metadata();
  for (auto& [key, value] : body.items()) doc[key] = std::move(value);
  std::filesystem::create_directories(config_.output_dir);
  write_file_atomic(std::filesystem::path(config_.output_dir) / name, doc.dump(2) + "\n");
  written_.push_back(name);
}

const Panel& Pipeline::full_panel() {
  if (!full_) {
    LoadOptions opts;
    opts.interpolate_gaps = config_.interpolate_gaps;
    opts.max_gap = config_.max_gap;
    opts.seasonally_adjusted = config_.seasonally_adjusted;
    if (!config_.goods.empty()) opts.goods = load_goods(config_.goods);
    if (config_.iip_goods) opts.goods = iip_goods_table();
    full_ = load_panel(config_.panel, opts);
  }
  return *full_;
}

const Panel& Pipeline::in_sample_panel() {
  if (!in_sample_) {
    const auto& full = full_panel();
    if (config_.in_sample_end.empty()) {
      in_sample_ = full;
    } else {
      in_sample_ = split_in_sample(full, YearMonth::parse(config_.in_sample_end)).first;
    }
  }
  return *in_sample_;
}

const GrowthPanel& Pipeline::growth() {
  if (!growth_) growth_ = to_growth(in_sample_panel());
  return *growth_;
}

const CorrelationModel& Pipeline::model() {
  if (!model_) model_ = correlation_matrix(growth());
  return *model_;
}

const ModeDecomposition& Pipeline::decomposition() {
  if (!md_) md_ = project_modes(growth(), model());
  return *md_;
}

std::vector<Index> Pipeline::selected_modes() {
  const auto m = growth().n_series();
  if (config_.modes.empty()) {
    std::vector<Index> all(static_cast<std::size_t>(m));
    for (Index n = 0; n < m; ++n) all[static_cast<std::size_t>(n)] = n + 1;
    return all;
  }
  for (auto n : config_.modes)
    if (n > m) throw InputError("mode " + std::to_string(n) + " exceeds M = " + std::to_string(m));
  return config_.modes;
}

json Pipeline::run(Stage stage) {
  auto fragment = run_stage(stage);
  emit_json(std::string(to_string(stage)) + ".json", json{{"result", fragment}});
  return fragment;
}

json Pipeline::run_stage(Stage stage) {
  try {
    switch (stage) {
      case Stage::ingest: return stage_ingest();
      case Stage::spectrum: return stage_spectrum();
      case Stage::factors: return stage_factors();
      case Stage::modes: return stage_modes();
      case Stage::leadlag: return stage_leadlag();
      case Stage::xspec: return stage_xspec();
      case Stage::oos: return stage_oos();
    }
  } catch (const Error& e) {
    rethrow_in_stage(e, stage);
  } catch (const std::filesystem::filesystem_error& e) {
    throw InputError("stage '" + std::string(to_string(stage)) + "': " + e.what());
  }
  throw InputError("unknown stage");
}

json Pipeline::run_all() {
  json stages = json::object();
  for (auto stage : all_stages()) stages[std::string(to_string(stage))] = run(stage);
  round_numbers(stages, 4);
  json summary;
  summary["schema_version"] = kSummarySchemaVersion;
  summary["metadata"] = metadata();
  summary["results"] = stages;
  std::filesystem::create_directories(config_.output_dir);
  write_file_atomic(std::filesystem::path(config_.output_dir) / "summary.json",
                    summary.dump(2) + "\n");
  written_.push_back("summary.json");
  return summary;
}

json Pipeline::stage_ingest() {
  const auto& full = full_panel();
  const auto& in = in_sample_panel();
  const auto& gp = growth();
  const Index g = gp.n_goods();

  {
    std::ostringstream out;
    write_panel(out, full, header_lines({}));
    std::filesystem::create_directories(config_.output_dir);
    write_file_atomic(std::filesystem::path(config_.output_dir) / "panel.csv", out.str());
    written_.push_back("panel.csv");
  }
  {
    std::ostringstream out;
    write_goods(out, full.goods);
    emit_csv("goods.csv", out.str());
  }
  {
    std::string body = "date,variable,good,kind,value\n";
    for (const char* kind : {"raw", "normalized"}) {
      const auto& rates = std::string(kind) == "raw" ? gp.rates_raw : gp.rates_norm;
      for (Index s = 0; s < gp.n_series(); ++s)
        for (Index j = 0; j < gp.n_prime(); ++j)
          body += gp.month(j).str() + "," + variable_name(s, g) + "," +
                  std::to_string(gp.goods[static_cast<std::size_t>(s % g)].id) + "," + kind + "," +
                  num(rates(s, j)) + "\n";
    }
    emit_csv("growth.csv", body, {"growth rates are log10 month-over-month ratios dated by the later month",
                                   "normalized = (raw - mean) / population std over the in-sample window"});
  }
  const auto lags = std::min<Index>(config_.autocorr_lags, gp.n_prime() - 1);
  const auto ac = autocorrelation(gp, lags);
  {
    std::string body = "variable,good,lag,value\n";
    for (Index s = 0; s < gp.n_series(); ++s)
      for (Index m = 0; m <= lags; ++m)
        body += variable_name(s, g) + "," + std::to_string(gp.goods[static_cast<std::size_t>(s % g)].id) +
                "," + std::to_string(m) + "," + num(ac.per_series(s, m)) + "\n";
    emit_csv("autocorrelation.csv", body);
    std::string mean = "variable,lag,value\n";
    for (Index v = 0; v < 3; ++v)
      for (Index m = 0; m <= lags; ++m)
        mean += std::string(to_string(kVariables[static_cast<std::size_t>(v)])) + "," +
                std::to_string(m) + "," + num(ac.averaged(v, m)) + "\n";
    emit_csv("autocorrelation_mean.csv", mean);
  }

  json lag1 = json::object();
  for (Index v = 0; v < 3; ++v)
    lag1[std::string(to_string(kVariables[static_cast<std::size_t>(v)]))] = ac.averaged(v, 1);
  return json{{"start", full.start.str()},
              {"end", full.last_month().str()},
              {"n_months", full.n_months()},
              {"n_goods", full.n_goods()},
              {"in_sample_end", in.last_month().str()},
              {"n_prime", gp.n_prime()},
              {"seasonally_adjusted", full.seasonally_adjusted},
              {"provenance", full.provenance},
              {"autocorrelation_lag1", lag1}};
}

json Pipeline::stage_spectrum() {
  const auto& gp = growth();
  const auto spec = averaged_power_spectrum(gp);
  const double scale = config_.spectrum_scale;
  std::vector<std::string> notes{"power scaled by " + num(scale)};
  {
    std::string body = "k,period_months,power\n";
    for (Index k : spec.half_range())
      body += std::to_string(k) + "," + num(spec.period(k)) + "," + num(scale * spec.power(k)) + "\n";
    emit_csv("spectrum.csv", body, notes);
  }

  std::vector<Index> chops;
  for (Index c : config_.chops.empty() ? default_chops() : config_.chops)
    if (c <= in_sample_panel().n_months()) chops.push_back(c);
  if (!chops.empty()) {
    std::string body = "months,k,period_months,power\n";
    for (const auto& c : chopped_spectra(in_sample_panel(), chops))
      for (Index k : c.spectrum.half_range())
        body += std::to_string(c.months) + "," + std::to_string(k) + "," + num(c.spectrum.period(k)) +
                "," + num(scale * c.spectrum.power(k)) + "\n";
    emit_csv("spectrum_chopped.csv", body, notes);
  }

  ContinuousSpectrumOptions opts;
  opts.min_cycles = config_.min_cycles;
  opts.min_prominence = config_.min_prominence;
  const double t_max = std::min(config_.t_max, static_cast<double>(gp.n_prime()));
  const auto cont = continuous_spectrum(gp, config_.t_min, t_max, config_.t_step, opts);
  {
    std::string body = "period_months,power\n";
    for (Index i = 0; i < cont.periods.size(); ++i)
      body += num(cont.periods(i)) + "," + num(scale * cont.power(i)) + "\n";
    emit_csv("spectrum_continuous.csv", body, notes);
  }
  json peaks = json::array();
  {
    std::string body = "period_months,power,prominence,cycles,one_time_event\n";
    for (const auto& p : cont.peaks) {
      body += num(p.period) + "," + num(scale * p.power) + "," + num(scale * p.prominence) + "," +
              num(p.cycles) + "," + (p.one_time_event ? "true" : "false") + "\n";
      peaks.push_back(json{{"period", p.period},
                           {"power", p.power},
                           {"prominence", p.prominence},
                           {"one_time_event", p.one_time_event}});
    }
    emit_csv("spectrum_peaks.csv", body,
             {"one_time_event: fewer than " + num(config_.min_cycles) + " full cycles in the sample"});
  }
  json at = json::object();
  for (Index k : config_.wavenumbers)
    if (2 * k <= gp.n_prime()) at[std::to_string(k)] = json{{"period", spec.period(k)}, {"power", spec.power(k)}};
  return json{{"n_prime", gp.n_prime()},
              {"power_sum", spec.power.sum()},
              {"selected_wavenumbers", at},
              {"continuous_grid", json{{"t_min", config_.t_min}, {"t_max", t_max}, {"step", config_.t_step}}},
              {"peaks", peaks}};
}

json Pipeline::stage_factors() {
  const auto& gp = growth();
  const auto& m = model();
  const auto params = rmt_params(gp.n_prime(), gp.n_series());
  auto report = classify_significance(m, params);
  const Index g = gp.n_goods();
  {
    std::string body = "mode,eigenvalue,significant,margin\n";
    for (const auto& mode : report.modes)
      body += std::to_string(mode.mode) + "," + num(mode.eigenvalue) + "," +
              (mode.significant ? "true" : "false") + "," + num(mode.margin) + "\n";
    emit_csv("eigen.csv", body,
             {"lambda_plus = " + num(params.lambda_plus) + ", lambda_minus = " + num(params.lambda_minus) +
              ", Q = " + num(params.q)});
  }
  {
    std::string body = "mode,variable,good,component\n";
    for (Index n = 0; n < m.n_series(); ++n)
      for (Index s = 0; s < m.n_series(); ++s)
        body += std::to_string(n + 1) + "," + variable_name(s, g) + "," +
                std::to_string(gp.goods[static_cast<std::size_t>(s % g)].id) + "," +
                num(m.eigenvectors()(s, n)) + "\n";
    emit_csv("eigenvectors.csv", body, {"sign: mean production component of each eigenvector is positive"});
  }
  {
    std::string body = "lambda,density\n";
    for (const auto& [l, rho] : report.density_curve) body += num(l) + "," + num(rho) + "\n";
    emit_csv("rmt_density.csv", body);
  }

  json out{{"q", params.q},
           {"lambda_plus", params.lambda_plus},
           {"lambda_minus", params.lambda_minus},
           {"eigenvalues", std::vector<double>(m.eigenvalues().data(),
                                               m.eigenvalues().data() + std::min<Index>(5, m.n_series()))},
           {"eigenvalue_sum", m.eigenvalues().sum()},
           {"significant_modes", report.significant_modes},
           {"relative_contribution",
            json{{"mode1", m.eigenvalues()(0) / static_cast<double>(m.n_series())},
                 {"modes12", m.n_series() > 1 ? (m.eigenvalues()(0) + m.eigenvalues()(1)) /
                                                    static_cast<double>(m.n_series())
                                              : m.eigenvalues()(0) / static_cast<double>(m.n_series())}}}};

  if (config_.rotation_trials > 0) {
    RotationOptions ropts;
    ropts.bin_width = config_.bin_width;
    ropts.threads = config_.threads;
    const auto null_report = rotation_null(gp, config_.rotation_trials, config_.seed, ropts);
    const auto& null = *null_report.null_distribution;
    std::string body = "lambda_bin,density\n";
    for (std::size_t i = 0; i < null.bin_centers.size(); ++i)
      body += num(null.bin_centers[i]) + "," + num(null.density[i]) + "\n";
    emit_csv("null_pdf.csv", body,
             {"rotation null, " + std::to_string(null.trials) + " trials, bin width " + num(null.bin_width)});
    std::vector<Index> beyond_null;
    for (const auto& mode : report.modes)
      if (mode.eigenvalue > null.largest_p999) beyond_null.push_back(mode.mode);
    out["rotation_null"] = json{{"trials", null.trials},
                                {"largest", stats_json(null.largest)},
                                {"second", stats_json(null.second)},
                                {"largest_p999", null.largest_p999},
                                {"modes_above_p999", beyond_null}};
  }
  return out;
}

json Pipeline::stage_modes() {
  const auto& gp = growth();
  const auto& md = decomposition();
  const auto n_prime = gp.n_prime();
  const auto half = all_wavenumbers(n_prime);
  {
    std::string body = "mode,t,value\n";
    for (Index n = 0; n < md.n_modes(); ++n)
      for (Index j = 0; j < n_prime; ++j)
        body += std::to_string(n + 1) + "," + std::to_string(j + 1) + "," + num(md.coefficients(n, j)) + "\n";
    emit_csv("mode_coefficients.csv", body, {"t = 1 is " + gp.first_month.str()});
  }
  {
    std::string body = "mode,k,period_months,power\n";
    for (Index n = 0; n < md.n_modes(); ++n)
      for (Index k : half)
        body += std::to_string(n + 1) + "," + std::to_string(k) + "," +
                num(static_cast<double>(n_prime) / static_cast<double>(k)) + "," + num(md.mode_power(n, k)) + "\n";
    emit_csv("mode_spectrum.csv", body);
  }
  const auto edges = default_period_bins(n_prime);
  {
    std::string body = "period_lo,period_hi,count,mode1,mode2,both\n";
    auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
    for (const auto& b : binned_relative_contribution(md, edges))
      body += num(b.lo) + "," + num(b.hi) + "," + std::to_string(b.count) + "," + opt(b.mode1) + "," +
              opt(b.mode2) + "," + opt(b.both) + "\n";
    emit_csv("mode_bins.csv", body,
             {"bins: one per wavenumber for k <= 12, then period ratio 1.25 down to 2 months",
              "share = sum_k lambda^(n)(w_k) / sum_k M p(w_k) over the bin; empty bins left blank"});
  }

  const auto modes = selected_modes();
  const auto cr = reconstruct_cycles(md, modes, config_.wavenumbers);
  {
    std::string body = "variable,t,value,component\n";
    for (Index v = 0; v < 3; ++v) {
      const std::string var(to_string(kVariables[static_cast<std::size_t>(v)]));
      for (std::size_t i = 0; i < modes.size(); ++i)
        for (Index j = 0; j < n_prime; ++j)
          body += var + "," + std::to_string(j + 1) + "," + num(cr.averaged_by_mode[i](v, j)) + ",mode" +
                  std::to_string(modes[i]) + "\n";
      for (Index j = 0; j < n_prime; ++j)
        body += var + "," + std::to_string(j + 1) + "," + num(cr.averaged(v, j)) + ",sum\n";
    }
    emit_csv("cycles.csv", body, {"averaged over goods; t = 1 is " + gp.first_month.str()});
  }

  // Share of modes 1-2 above and below a 38-month period.
  const std::vector<double> split{2.0, 38.0, static_cast<double>(n_prime)};
  const auto bands = binned_relative_contribution(md, split);
  json amplitudes = json::object();
  for (std::size_t c = 0; c < cr.wavenumbers.size(); ++c) {
    json per = json::object();
    for (Index v = 0; v < 3; ++v) {
      const auto z = cr.amplitudes(v, static_cast<Index>(c));
      per[std::string(to_string(kVariables[static_cast<std::size_t>(v)]))] =
          json{{"amplitude", std::abs(z)}, {"phase", std::arg(z)}};
    }
    amplitudes[std::to_string(cr.wavenumbers[c])] = per;
  }
  auto band = [](const PeriodBin& b) {
    return json{{"mode1", b.mode1 ? json(*b.mode1) : json(nullptr)},
                {"modes12", b.both ? json(*b.both) : json(nullptr)}};
  };
  return json{{"modes", modes},
              {"wavenumbers", config_.wavenumbers},
              {"share_period_below_38", band(bands[0])},
              {"share_period_above_38", band(bands[1])},
              {"cycle_amplitudes", amplitudes}};
}

json Pipeline::stage_leadlag() {
  const auto& gp = growth();
  const auto& md = decomposition();
  const auto n_prime = gp.n_prime();
  const auto modes = selected_modes();
  const std::vector<VariablePair> pairs{kShipmentProduction, kProductionInventory};

  const auto cr = reconstruct_cycles(md, modes, config_.wavenumbers);
  json observed = json::object();
  for (auto pair : pairs)
    for (Index k : config_.wavenumbers)
      observed[lag_name(pair, n_prime, k)] = phase_delay(cr, pair, k).delta_months;

  // The same delays from all modes, with the cross-spectral phase test on the
  // goods-averaged growth rates as the significance check.
  const auto all = reconstruct_cycles(md, all_modes(md), config_.wavenumbers);
  json all_mode = json::object();
  const auto edge = parse_edge(config_.smoothing_edge);
  for (auto pair : pairs) {
    const auto x = gp.rates_norm.middleRows(static_cast<Index>(pair.leader) * gp.n_goods(), gp.n_goods())
                       .colwise().mean().transpose().eval();
    const auto y = gp.rates_norm.middleRows(static_cast<Index>(pair.follower) * gp.n_goods(), gp.n_goods())
                       .colwise().mean().transpose().eval();
    const auto est = coherency_phase(x, y, config_.kernel_span, 0, edge);
    for (Index k : config_.wavenumbers) {
      const auto d = delay_in_months(est, k);
      all_mode[lag_name(pair, n_prime, k)] =
          json{{"delta", phase_delay(all, pair, k).delta_months}, {"significant", d.excludes_zero()}};
    }
  }

  json out{{"modes", modes}, {"observed", observed}, {"all_modes", all_mode}};
  if (modes != two_modes()) {
    out["monte_carlo"] = json{{"skipped", "the reshuffle test applies to the two-mode reconstruction"}};
    return out;
  }
  if (config_.trials == 0) {
    out["monte_carlo"] = json{{"skipped", "trials = 0"}};
    return out;
  }
  ReshuffleOptions opts;
  opts.rule = parse_acceptance(config_.acceptance);
  opts.overlap_threshold = config_.overlap_threshold;
  opts.freeze_eigenvectors = config_.freeze_eigenvectors;
  opts.wavenumbers = config_.wavenumbers;
  opts.threads = config_.threads;
  opts.keep_samples = config_.keep_null_samples;
  const auto mc = reshuffle_significance(gp, model(), config_.trials, config_.seed, opts);

  auto summarize = [](const std::vector<LagQuantity>& qs) {
    json j = json::object();
    for (const auto& q : qs) j[q.name] = stats_json(q.null);
    return j;
  };
  out["monte_carlo"] = json{{"seed", mc.seed},
                            {"trials_requested", mc.trials_requested},
                            {"trials_used", mc.trials_used},
                            {"trials_rejected", mc.trials_rejected},
                            {"acceptance_rate", mc.acceptance_rate()},
                            {"acceptance", config_.acceptance},
                            {"primary", mc.frozen_primary ? "frozen" : "reestimated"},
                            {"reestimated", summarize(mc.reestimated)},
                            {"frozen", summarize(mc.frozen)}};
  if (config_.keep_null_samples) {
    std::string body = "quantity,method,sample,value\n";
    for (const auto* set : {&mc.reestimated, &mc.frozen}) {
      const std::string method = set == &mc.reestimated ? "reestimated" : "frozen";
      for (const auto& q : *set)
        for (std::size_t i = 0; i < q.samples.size(); ++i)
          body += q.name + "," + method + "," + std::to_string(i) + "," + num(q.samples[i]) + "\n";
    }
    emit_csv("lag_null_samples.csv", body, {"accepted trials in trial order"});
  }
  return out;
}

json Pipeline::stage_xspec() {
  const auto& gp = growth();
  const auto& md = decomposition();
  const auto modes = selected_modes();
  const auto n_prime = gp.n_prime();
  const auto edge = parse_edge(config_.smoothing_edge);
  const auto two = reconstruct_cycles(md, modes, all_wavenumbers(n_prime));
  Eigen::MatrixXd original(3, n_prime);
  for (Index v = 0; v < 3; ++v)
    original.row(v) = gp.rates_norm.middleRows(v * gp.n_goods(), gp.n_goods()).colwise().mean();

  struct Variant {
    std::string name;
    const Eigen::MatrixXd* series;
  };
  const std::vector<Variant> variants{{"two_mode", &two.averaged}, {"all_mode", &original}};
  const std::vector<std::pair<VariablePair, Index>> pairs{{kShipmentProduction, config_.alignment_sp},
                                                          {kProductionInventory, config_.alignment_pi}};
  json out = json::object();
  for (const auto& variant : variants) {
    json per_variant = json::object();
    for (const auto& [pair, shift] : pairs) {
      const Eigen::VectorXd x = variant.series->row(static_cast<Index>(pair.leader)).transpose();
      const Eigen::VectorXd y = variant.series->row(static_cast<Index>(pair.follower)).transpose();
      const auto est = coherency_phase(x, y, config_.kernel_span, shift, edge);
      std::string body = "k,period_months,kappa2,phase_cycles,phase_ci_low,phase_ci_high,significant_90,significant_99\n";
      for (Index k = 1; 2 * k <= n_prime; ++k)
        body += std::to_string(k) + "," + num(static_cast<double>(n_prime) / static_cast<double>(k)) + "," +
                num(est.kappa2(k)) + "," + num(est.phase(k)) + "," + num(est.phase_ci_low(k)) + "," +
                num(est.phase_ci_high(k)) + "," + (est.significant90(k) ? "true" : "false") + "," +
                (est.significant99(k) ? "true" : "false") + "\n";
      std::string weights;
      for (double w : est.kernel_weights) weights += (weights.empty() ? "" : " ") + csv::format_double(w, 6);
      emit_csv("xspec_" + variant.name + "_" + pair.code() + ".csv", body,
               {"kernel: modified Daniell span " + std::to_string(config_.kernel_span) + " weights " + weights +
                    ", " + config_.smoothing_edge + " edges, no taper",
                "bandwidth (cycles/month) " + num(est.bandwidth) + ", equivalent dof " + num(est.eq_dof),
                "significance c = 1 - alpha^(1/(m-1)), m = dof/2: 90% " + num(est.level90) + ", 99% " +
                    num(est.level99),
                "phase 95% band: phase +- 1.96 sqrt((1/(2m)) (1/kappa2 - 1)) / (2 pi) cycles, where kappa2 > 90% level",
                "y = " + std::string(to_string(pair.follower)) + " advanced by " + std::to_string(shift) +
                    " months before estimation"});
      json delays = json::object();
      for (Index k : config_.wavenumbers) {
        const auto d = delay_in_months(est, k);
        delays[lag_name(pair, n_prime, k)] = json{{"significant", d.significant},
                                                  {"delta", jnum(d.delta)},
                                                  {"ci_low", jnum(d.ci_low)},
                                                  {"ci_high", jnum(d.ci_high)},
                                                  {"excludes_zero", d.excludes_zero()}};
      }
      per_variant[pair.code()] = json{{"alignment_shift", shift},
                                      {"bandwidth", est.bandwidth},
                                      {"eq_dof", est.eq_dof},
                                      {"level90", est.level90},
                                      {"level99", est.level99},
                                      {"delays", delays}};
    }
    out[variant.name] = per_variant;
  }
  return out;
}

json Pipeline::stage_oos() {
  const auto& full = full_panel();
  const auto& gp = growth();
  const auto mode = parse_oos_normalization(config_.oos_normalization);
  const auto modes = selected_modes();
  const auto report = project_out_of_sample(full, model(), gp, modes, mode);
  {
    std::string body = "t,date,P";
    for (auto n : modes) body += ",partial_mode" + std::to_string(n);
    for (auto n : modes) body += ",pi_mode" + std::to_string(n);
    body += "\n";
    for (Index j = 0; j < report.n_months(); ++j) {
      body += std::to_string(j + 1) + "," + report.month(j).str() + "," + num(report.total(j));
      for (Index i = 0; i < report.partial.rows(); ++i) body += "," + num(report.partial(i, j));
      for (Index i = 0; i < report.relative.rows(); ++i) body += "," + num(report.relative(i, j));
      body += "\n";
    }
    emit_csv("volatility.csv", body,
             {"normalization: " + std::string(to_string(mode)),
              "in-sample months: " + report.month(report.in_sample_begin).str() + ".." +
                  report.month(report.in_sample_end - 1).str(),
              "pi left blank where P < 1e-12"});
  }
  if (!config_.aux.empty()) {
    const auto aux = load_aux_series(config_.aux);
    const auto table = auxiliary_overlay(report, aux);
    std::string body = "date," + csv::escape(table.aux_label) + ",P";
    for (auto n : modes) body += ",pi_mode" + std::to_string(n);
    body += "\n";
    for (std::size_t i = 0; i < table.months.size(); ++i) {
      const auto c = static_cast<Index>(i);
      body += table.months[i].str() + "," + num(table.aux(c)) + "," + num(table.total(c));
      for (Index r = 0; r < table.relative.rows(); ++r) body += "," + num(table.relative(r, c));
      body += "\n";
    }
    emit_csv("overlay.csv", body);
  }

  auto mean_share = [&](Index row, Index from, Index to) -> json {
    double acc = 0.0;
    Index n = 0;
    for (Index j = from; j < to; ++j) {
      if (const auto p = report.pi(row, j)) {
        acc += *p;
        ++n;
      }
    }
    return n == 0 ? json(nullptr) : json(acc / static_cast<double>(n));
  };
  json shares = json::object();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto row = static_cast<Index>(i);
    json s{{"in_sample_mean", mean_share(row, report.in_sample_begin, report.in_sample_end)},
           {"out_of_sample_mean", mean_share(row, report.in_sample_end, report.n_months())}};
    Index best = -1;
    for (Index j = report.in_sample_end; j < report.n_months(); ++j)
      if (report.pi(row, j) && (best < 0 || report.relative(row, j) > report.relative(row, best))) best = j;
    if (best >= 0) s["out_of_sample_max"] = json{{"date", report.month(best).str()}, {"value", report.relative(row, best)}};
    shares["mode" + std::to_string(modes[i])] = s;
  }
  return json{{"normalization", to_string(mode)},
              {"first_month", report.first_month.str()},
              {"in_sample_end", report.month(report.in_sample_end - 1).str()},
              {"months", report.n_months()},
              {"out_of_sample_months", report.n_months() - report.in_sample_end},
              {"relative_share", shares}};
}

}  // namespace bcycle
