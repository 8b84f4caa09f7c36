#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "crgd/checks.hpp"
#include "crgd/experiments.hpp"

namespace crgd {

const char* version();

using LabeledTrajectory = std::pair<std::string, const Trajectory*>;

// Columns: method,t,x1,x2 (2-D states) or method,t,x_norm, then
// J,phi,grad_norm,lambda_min,u_norm. Doubles use 17 significant digits.
void write_trajectories_csv(const std::filesystem::path& path,
                            const std::vector<LabeledTrajectory>& runs);

// law,t,phi,reference (reference empty for the GD row set).
void write_rate_profiles_csv(const std::filesystem::path& path, const RateProfiles& profiles);

void write_gap_sweep_csv(const std::filesystem::path& path, const GapSweepResult& result);
void write_gap_fit_csv(const std::filesystem::path& path, const GapSweepResult& result);

void write_monte_carlo_csv(const std::filesystem::path& path, const MonteCarloReport& report);
void write_monte_carlo_trials_csv(const std::filesystem::path& path,
                                  const MonteCarloReport& report);

void write_grid_scan_csv(const std::filesystem::path& path, const GridScanResult& result);

void write_beta_sweep_csv(const std::filesystem::path& path, const BetaSweepResult& result);

void write_checks_csv(const std::filesystem::path& path, const std::vector<CheckResult>& results);

// manifest.json: version, the resolved config (including the seed) and the
// artifact file names.
void write_manifest(const std::filesystem::path& path, const nlohmann::json& config,
                    const std::vector<std::string>& artifacts);

}  // namespace crgd
