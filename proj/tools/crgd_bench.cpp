#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crgd/acceptance.hpp"
#include "crgd/checks.hpp"
#include "crgd/config.hpp"
#include "crgd/curvature.hpp"
#include "crgd/experiments.hpp"
#include "crgd/plot.hpp"
#include "crgd/report.hpp"

namespace fs = std::filesystem;
using namespace crgd;

namespace {

// Command-line values; each one overrides the config file when given.
struct Flags {
  std::string config_path;
  std::optional<std::string> law;
  std::optional<double> c, alpha, T, mu;
  std::optional<double> beta;
  std::optional<int> n;
  std::optional<double> delta;
  std::optional<int> trials;
  std::optional<std::vector<double>> deltas, horizons, betas;
  std::optional<int> resolution;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  bool full_scale = false;
  bool assert_mode = false;
};

void add_common_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON config file (flags override its values)");
  sub->add_option("--law", f.law, "exponential, finite, fixed or prescribed");
  sub->add_option("--c", f.c, "exponential / finite-time gain");
  sub->add_option("--alpha", f.alpha, "finite-time / fixed-time exponent");
  sub->add_option("--T", f.T, "prescribed settling time");
  sub->add_option("--mu", f.mu, "prescribed-time exponent");
  sub->add_option("--beta", f.beta, "curvature penalty weight");
  sub->add_option("--n", f.n, "factorization dimension");
  sub->add_option("--delta", f.delta, "factorization gap for the beta sweep");
  sub->add_option("--trials", f.trials, "Monte Carlo trials per gap");
  sub->add_option("--deltas", f.deltas, "comma-separated gap list")->delimiter(',');
  sub->add_option("--horizons", f.horizons, "comma-separated Monte Carlo horizons")->delimiter(',');
  sub->add_option("--betas", f.betas, "comma-separated beta list")->delimiter(',');
  sub->add_option("--resolution", f.resolution, "grid-scan points per axis");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--jobs", f.jobs, "worker threads");
  sub->add_option("--out", f.out, "output root (default $CRGD_OUTPUT_ROOT or ./runs)");
  sub->add_flag("--full-scale", f.full_scale, "use the full gap list and 2000 trials");
  sub->add_flag("--assert", f.assert_mode, "exit 2 when the matching acceptance criterion fails");
}

RunConfig build_config(const std::string& experiment, const Flags& f) {
  RunConfig cfg = f.config_path.empty() ? RunConfig{} : load_config(f.config_path);
  cfg.experiment = experiment;
  if (f.law) cfg.law.type = *f.law;
  if (f.c) cfg.law.c = *f.c;
  if (f.alpha) cfg.law.alpha = *f.alpha;
  if (f.T) cfg.law.T = *f.T;
  if (f.mu) cfg.law.mu = *f.mu;
  if (f.beta) cfg.crgd.beta = *f.beta;
  if (f.n) cfg.problem.n = *f.n;
  if (f.delta) cfg.problem.delta = *f.delta;
  if (f.trials) cfg.params.trials = *f.trials;
  if (f.deltas) cfg.params.deltas = *f.deltas;
  if (f.horizons) cfg.params.horizons = *f.horizons;
  if (f.betas) cfg.params.betas = *f.betas;
  if (f.resolution) cfg.params.resolution = *f.resolution;
  if (f.seed) cfg.seed = *f.seed;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.out) cfg.output_dir = *f.out;
  if (f.full_scale) cfg.full_scale = true;
  cfg.finalize();
  return cfg;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Collects artifact names relative to the run directory.
struct RunDir {
  fs::path path;
  std::vector<std::string> artifacts;

  fs::path file(const std::string& name) {
    artifacts.push_back(name);
    return path / name;
  }
};

std::vector<double> column(const Trajectory& traj, double Sample::*field) {
  std::vector<double> out;
  out.reserve(traj.samples.size());
  for (const Sample& s : traj.samples) out.push_back(s.*field);
  return out;
}

Series path_series(const std::string& label, const Trajectory& traj, const std::string& color) {
  Series s{label, {}, {}, color};
  for (const Sample& sm : traj.samples) {
    s.x.push_back(sm.x(0));
    s.y.push_back(sm.x(1));
  }
  return s;
}

std::vector<CriterionOutcome> run_threefold(const RunConfig& cfg, RunDir& dir) {
  const ExperimentConfig ecfg = cfg.experiment_config();
  std::vector<CriterionOutcome> outcomes;

  Stopwatch split_clock;
  const ThreeFoldComparison cmp = run_threefold_comparison(ecfg);
  outcomes.push_back(evaluate_threefold(cmp, ecfg.threefold));
  apply_runtime(outcomes.back(), split_clock.seconds());

  Stopwatch rate_clock;
  const RateProfiles rates = run_rate_profiles(ecfg);
  outcomes.push_back(evaluate_rate_profiles(rates));
  apply_runtime(outcomes.back(), rate_clock.seconds());

  write_trajectories_csv(dir.file("trajectories.csv"), {{"gd", &cmp.gd}, {"crgd", &cmp.crgd}});
  write_rate_profiles_csv(dir.file("rate_profiles.csv"), rates);

  // Landscape contours with both trajectories.
  const auto [lo, hi] = cfg.bounds();
  const ThreeFoldObjective problem(ecfg.threefold);
  ScalarGrid grid{lo, hi, lo, hi, 241, 241, {}};
  grid.values.reserve(static_cast<std::size_t>(grid.nx) * grid.ny);
  double jmin = INFINITY;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      grid.values.push_back(problem.value(Vector{{grid.x(i), grid.y(j)}}));
      jmin = std::min(jmin, grid.values.back());
    }
  }
  std::vector<double> levels;
  for (int k = 1; k <= 24; ++k) levels.push_back(jmin + (3.0 - jmin) * std::pow(k / 24.0, 2));
  Series start{"start", {cmp.x0(0)}, {cmp.x0(1)}, "black"};
  start.markers = true;
  write_text_file(dir.file("threefold_trajectories.svg"),
                  contour_chart_svg(grid, levels,
                                    {path_series("GD", cmp.gd, "#d62728"),
                                     path_series("CRGD", cmp.crgd, "#1f77b4"), start},
                                    {"Three-fold landscape", "x1", "x2"}));

  write_text_file(dir.file("threefold_cost.svg"),
                  line_chart_svg({{"GD J", column(cmp.gd, &Sample::t), column(cmp.gd, &Sample::cost)},
                                  {"CRGD J", column(cmp.crgd, &Sample::t),
                                   column(cmp.crgd, &Sample::cost)},
                                  {"CRGD Phi", column(cmp.crgd, &Sample::t),
                                   column(cmp.crgd, &Sample::phi), "", true}},
                                 {"Cost along the trajectories", "t", "J, Phi", true, false}));

  std::vector<Series> rate_series;
  const char* law_colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (std::size_t k = 0; k < rates.crgd.size(); ++k) {
    const RateProfile& p = rates.crgd[k];
    const std::string color = law_colors[k % 4];
    Series s{law_name(p.law), {}, {}, color};
    Series ref{law_name(p.law) + " ref", {}, {}, color, true};
    const double t0 = p.trajectory.initial().t;
    for (const Sample& sm : p.trajectory.samples) {
      s.x.push_back(sm.t);
      s.y.push_back(sm.phi - cfg.crgd.phi_star_estimate);
      ref.x.push_back(sm.t);
      ref.y.push_back(reference_solution(p.law, p.v0, sm.t - t0));
    }
    rate_series.push_back(std::move(s));
    rate_series.push_back(std::move(ref));
  }
  write_text_file(dir.file("rate_profiles.svg"),
                  line_chart_svg(rate_series, {"Phi decay per law", "t", "Phi - Phi*", false, true}));

  std::cout << "GD:   " << to_string(cmp.gd.status.kind) << " at t=" << cmp.gd.status.t
            << ", J=" << cmp.gd.final().cost << "\n"
            << "CRGD: " << to_string(cmp.crgd.status.kind) << " at t=" << cmp.crgd.status.t
            << ", J=" << cmp.crgd.final().cost << "\n";
  for (const RateProfile& p : rates.crgd) {
    std::cout << "law " << law_name(p.law) << ": max rel error " << p.max_rel_error
              << ", plateau at t=" << p.plateau_time << "\n";
  }
  return outcomes;
}

std::vector<CriterionOutcome> run_gap(const RunConfig& cfg, RunDir& dir) {
  Stopwatch clock;
  const GapSweepResult r = run_gap_sweep(cfg.deltas(), cfg.problem.n, cfg.experiment_config());
  CriterionOutcome outcome = evaluate_gap_sweep(r);
  apply_runtime(outcome, clock.seconds());

  write_gap_sweep_csv(dir.file("gap_sweep.csv"), r);
  write_gap_fit_csv(dir.file("gap_fit.csv"), r);
  Series gd{"GD", {}, {}}, crgd{"CRGD", {}, {}};
  gd.markers = crgd.markers = true;
  for (const GapSweepRow& row : r.rows) {
    gd.x.push_back(row.delta);
    gd.y.push_back(row.t_conv_gd);
    crgd.x.push_back(row.delta);
    crgd.y.push_back(row.t_conv_crgd);
  }
  write_text_file(dir.file("gap_sweep.svg"),
                  line_chart_svg({gd, crgd}, {"Convergence time vs gap", "delta", "t_conv", true, true}));

  for (const GapSweepRow& row : r.rows) {
    std::cout << "delta=" << row.delta << "  GD t=" << row.t_conv_gd << " ("
              << to_string(row.status_gd) << ")  CRGD t=" << row.t_conv_crgd << " ("
              << to_string(row.status_crgd) << ")\n";
  }
  std::cout << "slopes: GD " << r.fit_gd.slope << ", CRGD " << r.fit_crgd.slope << "\n";
  for (const std::string& w : r.warnings) std::cerr << "warning: " << w << "\n";
  return {outcome};
}

std::vector<CriterionOutcome> run_mc(const RunConfig& cfg, RunDir& dir) {
  Stopwatch clock;
  const MonteCarloReport r = run_monte_carlo(cfg.deltas(), cfg.trials(), cfg.horizons(), cfg.seed,
                                             cfg.problem.n, cfg.experiment_config());
  CriterionOutcome outcome = evaluate_monte_carlo(r);
  apply_runtime(outcome, clock.seconds());

  write_monte_carlo_csv(dir.file("monte_carlo.csv"), r);
  write_monte_carlo_trials_csv(dir.file("monte_carlo_trials.csv"), r);
  std::vector<Series> series;
  for (double h : cfg.horizons()) {
    for (const char* method : {"gd", "crgd"}) {
      Series s{std::string(method) + " T=" + std::to_string(static_cast<long>(h)), {}, {}};
      s.markers = true;
      s.dashed = std::string(method) == "crgd";
      for (const MonteCarloCell& c : r.cells) {
        if (c.method == method && c.horizon == h) {
          s.x.push_back(c.delta);
          s.y.push_back(c.rate_percent());
        }
      }
      series.push_back(std::move(s));
    }
  }
  write_text_file(dir.file("monte_carlo.svg"),
                  line_chart_svg(series, {"SOSP rate", "delta", "rate (%)", true, false}));

  for (const MonteCarloCell& c : r.cells) {
    std::cout << c.method << " delta=" << c.delta << " T=" << c.horizon << ": " << c.rate_percent()
              << "% (" << c.sosp_count << "/" << c.trials << ", +-" << c.std_error_percent()
              << ")\n";
  }
  return {outcome};
}

std::vector<CriterionOutcome> run_grid(const RunConfig& cfg, RunDir& dir) {
  const auto [lo, hi] = cfg.bounds();
  ThreeFoldParams params;
  params.eta = cfg.problem.eta;
  Stopwatch clock;
  const GridScanResult r = run_grid_scan(lo, hi, cfg.resolution(), cfg.crgd.beta, params);
  CriterionOutcome outcome = evaluate_grid_scan(r);
  apply_runtime(outcome, clock.seconds());

  write_grid_scan_csv(dir.file("grid_scan.csv"), r);
  // Contours of log10 |grad Phi| with the lambda_min = 0 boundary in red.
  const int res = r.resolution;
  ScalarGrid g{lo, hi, lo, hi, res, res, {}}, lam{lo, hi, lo, hi, res, res, {}};
  for (const GridCell& c : r.cells) {
    g.values.push_back(std::log10(std::max(c.grad_phi_norm, 1e-300)));
    lam.values.push_back(c.lambda_min);
  }
  std::vector<Series> boundary;
  for (const auto& s : contour_segments(lam, 0.0)) {
    boundary.push_back({"", {s[0], s[2]}, {s[1], s[3]}, "#d62728"});
  }
  if (!boundary.empty()) boundary.front().label = "lambda_min = 0";
  write_text_file(dir.file("grid_scan.svg"),
                  contour_chart_svg(g, {-3, -2, -1.5, -1, -0.5, 0, 0.5, 1}, boundary,
                                    {"log10 |grad Phi|", "x1", "x2"}));

  std::cout << r.negative_cells << " cells with lambda_min < " << r.curvature_threshold
            << "; min |grad Phi| = " << r.min_grad_phi << "\n";
  return {outcome};
}

std::vector<CriterionOutcome> run_beta(const RunConfig& cfg, RunDir& dir) {
  Stopwatch clock;
  const BetaSweepResult r =
      run_beta_sweep(cfg.betas(), cfg.problem.n, cfg.problem.delta, cfg.experiment_config());
  CriterionOutcome outcome = evaluate_beta_sweep(r);
  apply_runtime(outcome, clock.seconds());

  write_beta_sweep_csv(dir.file("beta_sweep.csv"), r);
  Series steps{"accepted steps", {}, {}};
  steps.markers = true;
  for (const BetaSweepRow& row : r.rows) {
    steps.x.push_back(row.beta);
    steps.y.push_back(static_cast<double>(row.steps));
  }
  write_text_file(dir.file("beta_sweep.svg"),
                  line_chart_svg({steps}, {"Integration cost vs beta", "beta", "steps", true, true}));

  for (const BetaSweepRow& row : r.rows) {
    std::cout << "beta=" << row.beta << ": " << to_string(row.status) << " t=" << row.t_end
              << " J=" << row.final_cost << " steps=" << row.steps << "\n";
  }
  return {outcome};
}

std::vector<CriterionOutcome> run_check(const RunConfig& cfg, RunDir& dir) {
  PropertySuiteOptions opt;
  opt.seed = cfg.seed;
  Stopwatch clock;
  const std::vector<CheckResult> results = run_property_suite(opt);
  CriterionOutcome outcome = evaluate_property_suite(results);
  apply_runtime(outcome, clock.seconds());

  write_checks_csv(dir.file("checks.csv"), results);
  Series ratio{"worst / tolerance", {}, {}};
  ratio.markers = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].tolerance > 0.0) {
      ratio.x.push_back(static_cast<double>(i + 1));
      ratio.y.push_back(results[i].worst / results[i].tolerance);
    }
  }
  write_text_file(dir.file("checks.svg"),
                  line_chart_svg({ratio}, {"Check margins", "check index", "worst / tol", false, true}));

  for (const CheckResult& r : results) {
    std::cout << (r.passed ? "ok   " : "FAIL ") << r.name << ": " << r.detail << "\n";
  }
  return {outcome};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature-regularized gradient dynamics benchmarks"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1, 1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"threefold", "three-fold landscape trajectories and rate profiles"},
      {"gap-sweep", "convergence time against the factorization gap"},
      {"monte-carlo", "SOSP rates from random starts"},
      {"grid-scan", "mesh scan for spurious critical points of Phi"},
      {"beta-sweep", "CRGD across penalty weights"},
      {"check", "invariant and finite-difference suite"}};
  for (const auto& [name, help] : commands) add_common_options(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const bool known = argc > 1 && std::any_of(commands.begin(), commands.end(), [&](const auto& c) {
      return c.first == argv[1];
    });
    if (argc > 1 && argv[1][0] != '-' && !known) {
      std::cerr << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
    } else {
      std::cerr << "error: " << e.what() << "\n\n" << app.help();
    }
    return 1;
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    cfg = build_config(experiment, flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  RunDir dir;
  dir.path = (cfg.output_dir.empty() ? default_output_root() : fs::path(cfg.output_dir)) / experiment;
  std::vector<CriterionOutcome> outcomes;
  try {
    fs::create_directories(dir.path);
    if (experiment == "threefold") outcomes = run_threefold(cfg, dir);
    else if (experiment == "gap-sweep") outcomes = run_gap(cfg, dir);
    else if (experiment == "monte-carlo") outcomes = run_mc(cfg, dir);
    else if (experiment == "grid-scan") outcomes = run_grid(cfg, dir);
    else if (experiment == "beta-sweep") outcomes = run_beta(cfg, dir);
    else outcomes = run_check(cfg, dir);
    dir.artifacts.push_back("manifest.json");
    write_manifest(dir.path / "manifest.json", to_json(cfg), dir.artifacts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::cout << "wrote " << dir.path.string() << "\n";
  bool ok = true;
  for (const CriterionOutcome& o : outcomes) {
    if (flags.assert_mode) std::cout << format_outcome(o) << "\n";
    ok = ok && o.passed;
  }
  return flags.assert_mode && !ok ? 2 : 0;
}
