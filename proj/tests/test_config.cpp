#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "crgd/config.hpp"

using namespace crgd;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  const auto path = std::filesystem::temp_directory_path() / "crgd_empty_config.json";
  std::ofstream(path) << "\n";
  const RunConfig cfg = load_config(path);
  std::filesystem::remove(path);
  EXPECT_DOUBLE_EQ(cfg.crgd.beta, 1.0);
  EXPECT_DOUBLE_EQ(cfg.crgd.eps_r, 1e-12);
  ASSERT_TRUE(std::holds_alternative<Exponential>(cfg.crgd.law));
  EXPECT_DOUBLE_EQ(std::get<Exponential>(cfg.crgd.law).c, 2.0);
  EXPECT_DOUBLE_EQ(cfg.solver.rtol, 1e-10);
  EXPECT_DOUBLE_EQ(cfg.problem.eta, 0.7);
  EXPECT_EQ(cfg.problem.n, 50);
}

TEST(Config, EmptyObjectGivesDefaults) {
  const RunConfig cfg = parse_config("{}");
  EXPECT_DOUBLE_EQ(cfg.crgd.beta, 1.0);
  EXPECT_EQ(cfg.seed, 42u);
}

TEST(Config, NegativeBetaIsRejected) {
  EXPECT_EQ(error_of(R"({"crgd": {"beta": -1}})"), "crgd.beta: must be > 0");
}

TEST(Config, PrescribedLawAccepted) {
  const RunConfig cfg = parse_config(R"({"law": {"type": "prescribed", "T": 0.1, "mu": 2}})");
  ASSERT_TRUE(std::holds_alternative<PrescribedTime>(cfg.crgd.law));
  EXPECT_DOUBLE_EQ(std::get<PrescribedTime>(cfg.crgd.law).T, 0.1);
  EXPECT_DOUBLE_EQ(std::get<PrescribedTime>(cfg.crgd.law).mu, 2.0);
}

TEST(Config, ErrorsCarryFieldPaths) {
  EXPECT_EQ(error_of(R"({"crgd": {"foo": 1}})").rfind("crgd.foo", 0), 0u);
  EXPECT_EQ(error_of(R"({"solver": {"rtol": "tight"}})").rfind("solver.rtol", 0), 0u);
  EXPECT_EQ(error_of(R"({"law": {"type": "linear"}})").rfind("law.type", 0), 0u);
  EXPECT_EQ(error_of(R"({"params": {"bounds": [1]}})").rfind("params.bounds", 0), 0u);
  EXPECT_EQ(error_of(R"({"params": {"trials": 0}})").rfind("params.trials", 0), 0u);
  EXPECT_EQ(error_of(R"({"law": {"type": "finite", "alpha": 1.5}})").rfind("law", 0), 0u);
  EXPECT_FALSE(error_of("{not json").empty());
}

TEST(Config, DeskAndFullScaleDefaults) {
  RunConfig cfg = parse_config(R"({"experiment": "gap-sweep"})");
  EXPECT_EQ(cfg.deltas(), kDeskGaps);
  cfg.full_scale = true;
  EXPECT_EQ(cfg.deltas(), kPaperGaps);

  RunConfig mc = parse_config(R"({"experiment": "monte-carlo"})");
  EXPECT_EQ(mc.deltas(), (std::vector<double>{0.1, 0.001}));
  EXPECT_EQ(mc.trials(), 100);
  EXPECT_EQ(mc.horizons(), (std::vector<double>{10.0, 1000.0}));
  mc.full_scale = true;
  EXPECT_EQ(mc.trials(), 2000);
}

TEST(Config, ParamsOverrideDefaults) {
  const RunConfig cfg = parse_config(
      R"({"experiment": "monte-carlo", "seed": 7, "params": {"deltas": [0.1], "trials": 5,
          "horizons": [1, 2], "resolution": 11, "bounds": [-1, 1]}})");
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.deltas(), std::vector<double>{0.1});
  EXPECT_EQ(cfg.trials(), 5);
  EXPECT_EQ(cfg.resolution(), 11);
  EXPECT_EQ(cfg.bounds()[0], -1.0);
}

TEST(Config, JsonRoundTrip) {
  const RunConfig cfg = parse_config(R"({"seed": 99, "crgd": {"beta": 2.5}, "law": {"type": "fixed"}})");
  const nlohmann::json j = to_json(cfg);
  EXPECT_EQ(j["seed"], 99);
  EXPECT_EQ(j["crgd"]["beta"], 2.5);
  // Re-parsing the manifest config (minus resolved params) reproduces the run.
  nlohmann::json again = j;
  again.erase("params");
  const RunConfig back = parse_config(again.dump());
  EXPECT_EQ(to_json(back), j);
}

TEST(Config, RandomBasisUsesSeed) {
  const RunConfig cfg = parse_config(R"({"seed": 3, "problem": {"basis": "random"}})");
  ASSERT_TRUE(cfg.experiment_config().matfac_basis_seed.has_value());
  EXPECT_EQ(*cfg.experiment_config().matfac_basis_seed, 3u);
  EXPECT_FALSE(parse_config("{}").experiment_config().matfac_basis_seed.has_value());
}

TEST(Config, OutputRootFromEnvironment) {
  setenv("CRGD_OUTPUT_ROOT", "/tmp/crgd_root", 1);
  EXPECT_EQ(default_output_root(), std::filesystem::path("/tmp/crgd_root"));
  unsetenv("CRGD_OUTPUT_ROOT");
  EXPECT_EQ(default_output_root(), std::filesystem::path("runs"));
}
