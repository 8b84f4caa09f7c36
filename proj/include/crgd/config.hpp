#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "crgd/experiments.hpp"

namespace crgd {

// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemConfig {
  double eta = 0.7;                // three-fold landscape
  int n = 50;                      // factorization dimension
  double delta = 0.01;             // factorization gap (beta sweep)
  std::string basis = "identity";  // "identity" or "random" (seeded)
};

struct LawConfig {
  std::string type = "exponential";
  double c = 2.0;
  double alpha = 0.5;
  double c1 = 1.0;
  double c2 = 1.0;
  double p = 1.5;
  double T = 0.1;
  double mu = 2.0;

  ConvergenceLaw build() const;
};

// Per-experiment parameters; unset fields take experiment defaults (desk or
// full scale).
struct ExperimentParams {
  std::optional<std::vector<double>> deltas;
  std::optional<int> trials;
  std::optional<std::vector<double>> horizons;
  std::optional<std::vector<double>> betas;
  std::optional<int> resolution;
  std::optional<std::array<double, 2>> bounds;
};

inline const std::vector<std::string> kExperiments = {"threefold", "gap-sweep", "monte-carlo",
                                                      "grid-scan", "beta-sweep", "check"};

struct RunConfig {
  std::string experiment = "threefold";
  std::uint64_t seed = 42;
  std::string output_dir;  // empty: $CRGD_OUTPUT_ROOT or ./runs
  bool full_scale = false;
  int jobs = 1;
  ProblemConfig problem;
  CrgdConfig crgd;  // crgd.law is rebuilt from `law` by finalize()
  LawConfig law;
  SolverConfig solver;
  ExperimentParams params;

  // Rebuilds crgd.law from `law` and validates everything; throws ConfigError.
  void finalize();
  ExperimentConfig experiment_config() const;

  std::vector<double> deltas() const;
  int trials() const;
  std::vector<double> horizons() const;
  std::vector<double> betas() const;
  int resolution() const;
  std::array<double, 2> bounds() const;
};

// Parses a JSON config. An empty (or whitespace-only) file yields defaults.
// Unknown keys and type mismatches are reported with their field paths.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);

nlohmann::json to_json(const RunConfig& cfg);

// $CRGD_OUTPUT_ROOT when set, else "runs".
std::filesystem::path default_output_root();

}  // namespace crgd
