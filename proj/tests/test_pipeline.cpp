#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "bcycle/error.hpp"
#include "bcycle/pipeline.hpp"
#include "bcycle/synthetic.hpp"

namespace fs = std::filesystem;
using bcycle::RunConfig;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("bcycle_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunConfig small_run(const fs::path& dir) {
  bcycle::SyntheticOptions opts;
  opts.n_months = 150;
  opts.n_goods = 8;
  const auto panel_path = dir / "panel.csv";
  bcycle::save_panel(panel_path, bcycle::synthetic_panel(5, opts));
  RunConfig c;
  c.panel = panel_path.string();
  c.in_sample_end = "1998-12";
  c.trials = 100;
  c.rotation_trials = 30;
  c.threads = 2;
  c.output_dir = (dir / "out").string();
  return c;
}

}  // namespace

TEST(Pipeline, Sha256KnownVectors) {
  EXPECT_EQ(bcycle::sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(bcycle::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Pipeline, RoundSignificant) {
  EXPECT_DOUBLE_EQ(bcycle::round_significant(123456.0), 123500.0);
  EXPECT_DOUBLE_EQ(bcycle::round_significant(0.000123456), 0.0001235);
  EXPECT_DOUBLE_EQ(bcycle::round_significant(-2.71828), -2.718);
  EXPECT_EQ(bcycle::round_significant(0.0), 0.0);
  EXPECT_TRUE(std::isnan(bcycle::round_significant(std::numeric_limits<double>::quiet_NaN())));
  EXPECT_TRUE(std::isinf(bcycle::round_significant(std::numeric_limits<double>::infinity())));
}

TEST(Pipeline, ConfigJsonRoundTrip) {
  RunConfig c;
  c.panel = "p.csv";
  c.seed = 77;
  c.modes = {1, 3};
  c.wavenumbers = {5};
  c.smoothing_edge = "truncate";
  c.t_step = 0.05;
  const auto back = bcycle::config_from_json(nlohmann::json::parse(bcycle::to_json(c).dump()));
  EXPECT_EQ(bcycle::to_json(back).dump(), bcycle::to_json(c).dump());
  EXPECT_EQ(bcycle::config_hash(back), bcycle::config_hash(c));
}

TEST(Pipeline, ConfigRejectsUnknownKeysAndBadTypes) {
  EXPECT_THROW((void)bcycle::config_from_json(nlohmann::json{{"seeed", 3}}), bcycle::InputError);
  EXPECT_THROW((void)bcycle::config_from_json(nlohmann::json{{"seed", "x"}}), bcycle::InputError);
  EXPECT_THROW((void)bcycle::config_from_json(nlohmann::json::array()), bcycle::InputError);
  const auto c = bcycle::config_from_json(nlohmann::json{{"trials", 500}});
  EXPECT_EQ(c.trials, 500);
  EXPECT_EQ(c.kernel_span, 11);
}

TEST(Pipeline, ValidateRejectsBadSettings) {
  RunConfig c;
  c.panel = "x.csv";
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.trials = 50;
  EXPECT_THROW(bad.validate(), bcycle::InputError);
  bad = c;
  bad.kernel_span = 10;
  EXPECT_THROW(bad.validate(), bcycle::InputError);
  bad = c;
  bad.smoothing_edge = "reflect";
  EXPECT_THROW(bad.validate(), bcycle::InputError);
  bad = c;
  bad.panel.clear();
  EXPECT_THROW(bad.validate(), bcycle::InputError);
}

TEST(Pipeline, AtomicWriteReplacesContents) {
  const auto dir = scratch("atomic");
  const auto f = dir / "a.txt";
  bcycle::write_file_atomic(f, "first");
  bcycle::write_file_atomic(f, "second");
  EXPECT_EQ(slurp(f), "second");
  EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 1);
}

TEST(Pipeline, MissingPanelIsInputError) {
  RunConfig c;
  c.panel = "/nonexistent/panel.csv";
  c.output_dir = scratch("missing").string();
  EXPECT_THROW(bcycle::Pipeline(c).run(bcycle::Stage::ingest), bcycle::InputError);
}

TEST(Pipeline, RunAllWritesReportsAndIsDeterministic) {
  const auto dir = scratch("all");
  const auto c = small_run(dir);
  bcycle::Pipeline first(c);
  const auto summary = first.run_all();
  const auto out = fs::path(c.output_dir);
  for (const char* f : {"panel.csv", "growth.csv", "spectrum.csv", "eigen.csv", "eigenvectors.csv",
                        "rmt_density.csv", "mode_coefficients.csv", "cycles.csv",
                        "xspec_two_mode_SP.csv", "xspec_all_mode_PI.csv", "volatility.csv",
                        "summary.json", "leadlag.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;

  EXPECT_EQ(summary["schema_version"], 1);
  EXPECT_EQ(summary["metadata"]["config_sha256"], bcycle::config_hash(c));
  EXPECT_EQ(summary["metadata"]["inputs"]["panel"]["sha256"], bcycle::file_sha256(c.panel));
  const auto& f = summary["results"]["factors"];
  EXPECT_NEAR(f["eigenvalue_sum"].get<double>(), 24.0, 1e-2);
  EXPECT_EQ(summary["results"]["leadlag"]["monte_carlo"]["trials_used"].get<int>() +
                summary["results"]["leadlag"]["monte_carlo"]["trials_rejected"].get<int>(),
            100);

  const auto csv = slurp(out / "eigen.csv");
  EXPECT_EQ(csv.rfind("# ", 0), 0u);
  EXPECT_NE(csv.find(bcycle::config_hash(c)), std::string::npos);

  const auto bytes = slurp(out / "summary.json");
  bcycle::Pipeline second(c);
  (void)second.run_all();
  EXPECT_EQ(slurp(out / "summary.json"), bytes);
}

TEST(Pipeline, StagesRunStandalone) {
  const auto dir = scratch("standalone");
  auto c = small_run(dir);
  c.trials = 0;
  bcycle::Pipeline p(c);
  const auto x = p.run(bcycle::Stage::xspec);
  EXPECT_TRUE(x.contains("two_mode"));
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "xspec.json"));
  EXPECT_FALSE(fs::exists(fs::path(c.output_dir) / "summary.json"));
  const auto l = bcycle::Pipeline(c).run(bcycle::Stage::leadlag);
  EXPECT_TRUE(l["monte_carlo"].contains("skipped"));
}

TEST(Pipeline, ModeBeyondMIsInputError) {
  const auto dir = scratch("modes");
  auto c = small_run(dir);
  c.modes = {1, 99};
  bcycle::Pipeline p(c);
  EXPECT_THROW((void)p.run(bcycle::Stage::modes), bcycle::InputError);
}
