#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crgd/dynamics.hpp"

namespace crgd {

// Shared knobs for every experiment runner.
struct ExperimentConfig {
  CrgdConfig crgd;
  SolverConfig solver;
  ThreeFoldParams threefold;
  int jobs = 1;  // worker threads for trial-level parallelism
  // Factorization targets use the identity eigenbasis unless a seed for a
  // random orthogonal basis is given.
  std::optional<std::uint64_t> matfac_basis_seed;

  void validate() const;
};

MatFacParams experiment_matfac_params(int n, double delta, const ExperimentConfig& cfg);

// Runs body(i) for i in [0, count) on up to `jobs` threads. Exceptions thrown
// by the body are rethrown on the calling thread.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

// ---------------------------------------------------------------------------
// Three-fold landscape

// x0 = [r_s, 1e-4], a point on the stable manifold of the saddle at (r_s, 0).
Vector threefold_saddle_start(const ThreeFoldParams& params);

struct ThreeFoldComparison {
  Vector x0;
  Trajectory gd;    // gradient flow with stall detection
  Trajectory crgd;  // CRGD under cfg.crgd
};

ThreeFoldComparison run_threefold_comparison(const ExperimentConfig& cfg);

struct RateProfile {
  ConvergenceLaw law;
  Trajectory trajectory;
  double v0 = 0.0;             // Phi(x0) - Phi~*
  double plateau_phi = 0.0;    // final Phi
  double plateau_time = 0.0;   // time the run settled (ConvergedSOSP) or ended
  double max_rel_error = 0.0;  // vs reference_solution over samples with Phi > 1.1 plateau
  int compared_samples = 0;
};

// Largest relative deviation of logged Phi from reference_solution(law, V0, t) + Phi~*
// over samples with Phi > 1.1 * final Phi.
RateProfile assess_rate_tracking(const Trajectory& traj, const ConvergenceLaw& law,
                                 double phi_star_estimate);

struct RateProfiles {
  Vector x0;
  std::vector<RateProfile> crgd;  // exponential, finite, fixed, prescribed
  Trajectory gd;
};

RateProfiles run_rate_profiles(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Matrix factorization

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual in log space
  int points = 0;
};

// Ordinary least squares on (ln x, ln y). Needs >= 3 positive points.
LogLogFit loglog_slope(std::span<const double> xs, std::span<const double> ys);

// x0 = sqrt(lambda_2) v_2 + 1e-3 v_1.
Vector adversarial_start(const MatFacObjective& problem);

inline const std::vector<double> kPaperGaps = {0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001};
inline const std::vector<double> kDeskGaps = {0.1, 0.05, 0.02, 0.01};

struct GapSweepRow {
  double delta = 0.0;
  double t_conv_gd = 0.0;
  double t_conv_crgd = 0.0;
  Termination status_gd = Termination::HorizonReached;
  Termination status_crgd = Termination::HorizonReached;
  double gd_horizon = 0.0;
  long steps_gd = 0;
  long steps_crgd = 0;
};

struct GapSweepResult {
  int n = 0;
  std::vector<GapSweepRow> rows;
  LogLogFit fit_gd;
  LogLogFit fit_crgd;
  std::vector<std::string> warnings;
};

// GD horizons scale as 10 / delta * ln(1e3); CRGD uses cfg.solver.t_max.
GapSweepResult run_gap_sweep(const std::vector<double>& deltas, int n, const ExperimentConfig& cfg);

struct MonteCarloTrial {
  double delta = 0.0;
  int trial = 0;
  std::string method;  // "gd" or "crgd"
  double horizon = 0.0;
  bool sosp = false;
  Termination status = Termination::HorizonReached;
  bool solver_failure = false;
};

struct MonteCarloCell {
  double delta = 0.0;
  double horizon = 0.0;
  std::string method;
  int trials = 0;
  int sosp_count = 0;
  int solver_failures = 0;

  double rate_percent() const { return trials > 0 ? 100.0 * sosp_count / trials : 0.0; }
  // Binomial standard error of the rate, in percentage points.
  double std_error_percent() const;
};

struct MonteCarloReport {
  std::uint64_t seed = 0;
  int n = 0;
  std::vector<MonteCarloCell> cells;    // ordered by (delta, horizon, method)
  std::vector<MonteCarloTrial> trials;  // ordered by (delta, trial, method, horizon)

  const MonteCarloCell& cell(double delta, double horizon, const std::string& method) const;
};

// Initial state for one trial: a seeded Gaussian draw normalized to the unit
// sphere. GD and CRGD share the draw.
Vector monte_carlo_start(int n, std::uint64_t seed, std::size_t delta_index, int trial);

MonteCarloReport run_monte_carlo(const std::vector<double>& deltas, int trials,
                                 const std::vector<double>& horizons, std::uint64_t seed, int n,
                                 const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Spurious critical points and beta

struct GridCell {
  double x1 = 0.0;
  double x2 = 0.0;
  double grad_phi_norm = 0.0;
  double lambda_min = 0.0;
};

struct GridScanResult {
  double lo = 0.0;
  double hi = 0.0;
  int resolution = 0;
  double beta = 0.0;
  std::vector<GridCell> cells;  // row-major, x2 outer
  std::vector<Vector> excluded_centers;
  double exclusion_radius = 0.05;
  double curvature_threshold = -1e-3;
  int negative_cells = 0;
  // Minimum |grad Phi| over cells with lambda_min < threshold outside the
  // exclusion balls; +inf when there are none.
  double min_grad_phi = 0.0;
  Vector argmin;
};

GridScanResult run_grid_scan(double lo, double hi, int resolution, double beta,
                             const ThreeFoldParams& params = {});

inline const std::vector<double> kDeskBetas = {1.0, 10.0, 50.0, 100.0, 125.0, 126.0};

struct BetaSweepRow {
  double beta = 0.0;
  Termination status = Termination::HorizonReached;
  double t_end = 0.0;
  bool sosp = false;
  double final_cost = 0.0;
  long steps = 0;
  long rejected = 0;
  std::string message;
};

struct BetaSweepResult {
  int n = 0;
  double delta = 0.0;
  std::vector<BetaSweepRow> rows;
  std::optional<double> largest_success;
  std::optional<double> smallest_failure;
};

BetaSweepResult run_beta_sweep(const std::vector<double>& betas, int n, double delta,
                               const ExperimentConfig& cfg);

}  // namespace crgd
