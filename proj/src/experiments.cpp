#include "crgd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace crgd {

void ExperimentConfig::validate() const {
  crgd.validate();
  solver.validate();
  threefold.validate();
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

MatFacParams experiment_matfac_params(int n, double delta, const ExperimentConfig& cfg) {
  MatFacParams params = default_matfac_params(n, delta);
  if (cfg.matfac_basis_seed) params.basis = random_orthogonal(n, *cfg.matfac_basis_seed);
  return params;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

bool is_solver_failure(Termination kind) {
  return kind == Termination::StepFloor || kind == Termination::StepLimit;
}

}  // namespace

// ---------------------------------------------------------------------------
// Three-fold landscape

Vector threefold_saddle_start(const ThreeFoldParams& params) {
  const ThreeFoldObjective problem(params);
  Vector x0(2);
  x0 << problem.saddle_radius(), 1e-4;
  return x0;
}

ThreeFoldComparison run_threefold_comparison(const ExperimentConfig& cfg) {
  cfg.validate();
  const ObjectivePtr problem = threefold_problem(cfg.threefold);
  ThreeFoldComparison out;
  out.x0 = threefold_saddle_start(cfg.threefold);

  const GradientField gd(problem, /*track_curvature=*/true, cfg.crgd.beta);
  out.gd = integrate(gd, out.x0, cfg.solver,
                     sosp_monitor(problem, cfg.crgd, {true, kDefaultStallWindow}));

  const CrgdField crgd(problem, cfg.crgd);
  out.crgd = integrate(crgd, out.x0, cfg.solver, sosp_monitor(problem, cfg.crgd, {true, 0}));
  return out;
}

RateProfile assess_rate_tracking(const Trajectory& traj, const ConvergenceLaw& law,
                                 double phi_star_estimate) {
  if (traj.samples.empty()) throw std::invalid_argument("assess_rate_tracking: empty trajectory");
  RateProfile out;
  out.law = law;
  out.v0 = std::max(0.0, traj.initial().phi - phi_star_estimate);
  out.plateau_phi = traj.final().phi;
  out.plateau_time = traj.converged() ? traj.status.t : traj.final().t;
  for (const Sample& s : traj.samples) {
    if (!(s.phi > 1.1 * out.plateau_phi)) continue;
    const double ref = reference_solution(law, out.v0, s.t - traj.initial().t) + phi_star_estimate;
    const double rel = std::abs(s.phi - ref) / std::max(std::abs(ref), 1e-300);
    out.max_rel_error = std::max(out.max_rel_error, rel);
    ++out.compared_samples;
  }
  return out;
}

RateProfiles run_rate_profiles(const ExperimentConfig& cfg) {
  cfg.validate();
  const ObjectivePtr problem = threefold_problem(cfg.threefold);
  RateProfiles out;
  out.x0 = threefold_saddle_start(cfg.threefold);

  std::vector<ConvergenceLaw> laws;
  for (const char* name : {"exponential", "finite", "fixed", "prescribed"}) {
    ConvergenceLaw law = default_law(name);
    // Keep user-specified parameters for the configured law family.
    if (law.index() == cfg.crgd.law.index()) law = cfg.crgd.law;
    laws.push_back(law);
  }
  out.crgd.resize(laws.size());
  parallel_for(laws.size(), cfg.jobs, [&](std::size_t i) {
    CrgdConfig c = cfg.crgd;
    c.law = laws[i];
    const CrgdField field(problem, c);
    Trajectory traj = integrate(field, out.x0, cfg.solver, sosp_monitor(problem, c, {true, 0}));
    out.crgd[i] = assess_rate_tracking(traj, c.law, c.phi_star_estimate);
    out.crgd[i].trajectory = std::move(traj);
  });

  const GradientField gd(problem, true, cfg.crgd.beta);
  out.gd = integrate(gd, out.x0, cfg.solver,
                     sosp_monitor(problem, cfg.crgd, {true, kDefaultStallWindow}));
  return out;
}

// ---------------------------------------------------------------------------
// Matrix factorization

LogLogFit loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("loglog_slope: size mismatch");
  if (xs.size() < 3) throw std::invalid_argument("loglog_slope: need at least 3 points");
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw std::invalid_argument("loglog_slope: values must be positive");
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("loglog_slope: x values must not all coincide");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.points = static_cast<int>(n);
  return fit;
}

Vector adversarial_start(const MatFacObjective& problem) {
  return std::sqrt(problem.eigenvalue(1)) * problem.eigenvector(1) + 1e-3 * problem.eigenvector(0);
}

GapSweepResult run_gap_sweep(const std::vector<double>& deltas, int n, const ExperimentConfig& cfg) {
  cfg.validate();
  if (n < 3) throw std::invalid_argument("gap sweep: n must be >= 3");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0 && deltas[i] < 0.5)) {
      throw std::invalid_argument("gap sweep: deltas must lie in (0, 0.5)");
    }
    if (i > 0 && !(deltas[i] < deltas[i - 1])) {
      throw std::invalid_argument("gap sweep: deltas must be strictly decreasing");
    }
  }

  GapSweepResult out;
  out.n = n;
  out.rows.resize(deltas.size());
  parallel_for(deltas.size(), cfg.jobs, [&](std::size_t i) {
    const double delta = deltas[i];
    const auto problem = std::make_shared<const MatFacObjective>(experiment_matfac_params(n, delta, cfg));
    const Vector x0 = adversarial_start(*problem);
    GapSweepRow& row = out.rows[i];
    row.delta = delta;

    SolverConfig crgd_solver = cfg.solver;
    crgd_solver.keep_samples = false;
    const Trajectory crgd = integrate(CrgdField(problem, cfg.crgd), x0, crgd_solver,
                                      sosp_monitor(problem, cfg.crgd, {true, 0}));
    row.status_crgd = crgd.status.kind;
    row.t_conv_crgd = crgd.status.t;
    row.steps_crgd = crgd.accepted;

    SolverConfig gd_solver = crgd_solver;
    gd_solver.t_max = 10.0 / delta * std::log(1e3);
    row.gd_horizon = gd_solver.t_max;
    const Trajectory gd =
        integrate(GradientField(problem), x0, gd_solver, sosp_monitor(problem, cfg.crgd, {true, 0}));
    row.status_gd = gd.status.kind;
    row.t_conv_gd = gd.status.t;
    row.steps_gd = gd.accepted;
  });

  std::vector<double> dg, tg, dc, tc;
  for (const GapSweepRow& row : out.rows) {
    if (row.status_gd == Termination::ConvergedSOSP && row.t_conv_gd > 0.0) {
      dg.push_back(row.delta);
      tg.push_back(row.t_conv_gd);
    } else {
      std::ostringstream w;
      w << "GD run at delta = " << row.delta << " ended with " << to_string(row.status_gd)
        << "; excluded from the fit";
      out.warnings.push_back(w.str());
    }
    if (row.status_crgd == Termination::ConvergedSOSP && row.t_conv_crgd > 0.0) {
      dc.push_back(row.delta);
      tc.push_back(row.t_conv_crgd);
    } else {
      std::ostringstream w;
      w << "CRGD run at delta = " << row.delta << " ended with " << to_string(row.status_crgd)
        << "; excluded from the fit";
      out.warnings.push_back(w.str());
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto fit_or_nan = [&](const std::vector<double>& x, const std::vector<double>& y,
                        const char* who) {
    if (x.size() >= 3) return loglog_slope(x, y);
    out.warnings.push_back(std::string("fewer than 3 converged ") + who + " runs; slope undefined");
    return LogLogFit{nan, nan, nan, static_cast<int>(x.size())};
  };
  out.fit_gd = fit_or_nan(dg, tg, "GD");
  out.fit_crgd = fit_or_nan(dc, tc, "CRGD");
  return out;
}

double MonteCarloCell::std_error_percent() const {
  if (trials <= 0) return 0.0;
  const double p = static_cast<double>(sosp_count) / trials;
  return 100.0 * std::sqrt(p * (1.0 - p) / trials);
}

const MonteCarloCell& MonteCarloReport::cell(double delta, double horizon,
                                             const std::string& method) const {
  for (const MonteCarloCell& c : cells) {
    if (c.delta == delta && c.horizon == horizon && c.method == method) return c;
  }
  throw std::out_of_range("MonteCarloReport: no cell for the requested configuration");
}

Vector monte_carlo_start(int n, std::uint64_t seed, std::size_t delta_index, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(delta_index), static_cast<std::uint32_t>(trial)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x(n);
  do {
    for (int i = 0; i < n; ++i) x(i) = normal(rng);
  } while (x.norm() == 0.0);
  return x / x.norm();
}

MonteCarloReport run_monte_carlo(const std::vector<double>& deltas, int trials,
                                 const std::vector<double>& horizons, std::uint64_t seed, int n,
                                 const ExperimentConfig& cfg) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("monte carlo: trials must be >= 1");
  if (horizons.empty()) throw std::invalid_argument("monte carlo: need at least one horizon");
  std::vector<double> hs = horizons;
  for (double h : hs) {
    if (!(h > 0.0)) throw std::invalid_argument("monte carlo: horizons must be positive");
  }
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());

  std::vector<std::shared_ptr<const MatFacObjective>> problems;
  for (double delta : deltas) {
    problems.push_back(std::make_shared<const MatFacObjective>(experiment_matfac_params(n, delta, cfg)));
  }

  static const char* kMethods[] = {"gd", "crgd"};
  const std::size_t per_trial = 2 * hs.size();
  MonteCarloReport report;
  report.seed = seed;
  report.n = n;
  report.trials.resize(deltas.size() * trials * per_trial);

  parallel_for(deltas.size() * trials, cfg.jobs, [&](std::size_t task) {
    const std::size_t d = task / trials;
    const int trial = static_cast<int>(task % trials);
    const auto& problem = problems[d];
    const Vector x0 = monte_carlo_start(n, seed, d, trial);
    MonteCarloTrial* slot = &report.trials[task * per_trial];

    for (int m = 0; m < 2; ++m) {
      const bool is_crgd = m == 1;
      std::unique_ptr<VectorField> field;
      if (is_crgd) {
        field = std::make_unique<CrgdField>(problem, cfg.crgd);
      } else {
        field = std::make_unique<GradientField>(problem);
      }
      Vector x = x0;
      double t = 0.0;
      bool converged = false;
      bool failed = false;
      Termination last = Termination::HorizonReached;
      for (std::size_t k = 0; k < hs.size(); ++k) {
        MonteCarloTrial& rec = slot[m * hs.size() + k];
        rec.delta = deltas[d];
        rec.trial = trial;
        rec.method = kMethods[m];
        rec.horizon = hs[k];
        const double t_end = std::min(hs[k], field->time_limit());
        // A CRGD run that reached an SOSP sits at a local minimizer of Phi.
        if (!converged && !failed && t < t_end) {
          SolverConfig solver = cfg.solver;
          solver.t_max = t_end;
          solver.keep_samples = false;
          StopPredicate stop;
          if (is_crgd) stop = sosp_monitor(problem, cfg.crgd, {true, 0});
          const Trajectory traj = integrate(*field, x, solver, stop, t);
          last = traj.status.kind;
          failed = is_solver_failure(last);
          converged = is_crgd && traj.converged();
          x = traj.final().x;
          t = traj.final().t;
        }
        rec.status = last;
        rec.solver_failure = failed;
        rec.sosp = !failed && (converged || is_sosp(*problem, x, cfg.crgd));
      }
    }
  });

  for (std::size_t d = 0; d < deltas.size(); ++d) {
    for (double h : hs) {
      for (const char* method : kMethods) {
        MonteCarloCell cell;
        cell.delta = deltas[d];
        cell.horizon = h;
        cell.method = method;
        for (const MonteCarloTrial& rec : report.trials) {
          if (rec.delta != deltas[d] || rec.horizon != h || rec.method != method) continue;
          ++cell.trials;
          cell.sosp_count += rec.sosp ? 1 : 0;
          cell.solver_failures += rec.solver_failure ? 1 : 0;
        }
        report.cells.push_back(cell);
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Spurious critical points and beta

GridScanResult run_grid_scan(double lo, double hi, int resolution, double beta,
                             const ThreeFoldParams& params) {
  if (resolution < 2) throw std::invalid_argument("grid scan: resolution must be >= 2");
  if (!(lo < hi)) throw std::invalid_argument("grid scan: need lo < hi");
  if (!(beta > 0.0)) throw std::invalid_argument("grid scan: beta must be > 0");
  const ThreeFoldObjective problem(params);

  GridScanResult out;
  out.lo = lo;
  out.hi = hi;
  out.resolution = resolution;
  out.beta = beta;
  out.excluded_centers.push_back(Vector::Zero(2));
  const double rm = problem.outer_minimum_radius();
  for (int k = 0; k < 3; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / 3.0;
    Vector c(2);
    c << rm * std::cos(angle), rm * std::sin(angle);
    out.excluded_centers.push_back(c);
  }

  out.cells.reserve(static_cast<std::size_t>(resolution) * resolution);
  out.min_grad_phi = std::numeric_limits<double>::infinity();
  const double step = (hi - lo) / (resolution - 1);
  Vector x(2);
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      x << lo + i * step, lo + j * step;
      const AugmentedEval e = augmented_eval(problem, x, beta);
      GridCell cell{x(0), x(1), e.grad_phi.norm(), e.eigen.lambda_min};
      out.cells.push_back(cell);
      if (!(cell.lambda_min < out.curvature_threshold)) continue;
      ++out.negative_cells;
      const bool excluded = std::any_of(
          out.excluded_centers.begin(), out.excluded_centers.end(),
          [&](const Vector& c) { return (x - c).norm() < out.exclusion_radius; });
      if (!excluded && cell.grad_phi_norm < out.min_grad_phi) {
        out.min_grad_phi = cell.grad_phi_norm;
        out.argmin = x;
      }
    }
  }
  return out;
}

BetaSweepResult run_beta_sweep(const std::vector<double>& betas, int n, double delta,
                               const ExperimentConfig& cfg) {
  cfg.validate();
  for (double b : betas) {
    if (!(b > 0.0)) throw std::invalid_argument("beta sweep: betas must be positive");
  }
  const auto problem = std::make_shared<const MatFacObjective>(experiment_matfac_params(n, delta, cfg));
  const Vector x0 = adversarial_start(*problem);

  BetaSweepResult out;
  out.n = n;
  out.delta = delta;
  out.rows.resize(betas.size());
  parallel_for(betas.size(), cfg.jobs, [&](std::size_t i) {
    CrgdConfig c = cfg.crgd;
    c.beta = betas[i];
    SolverConfig solver = cfg.solver;
    solver.keep_samples = false;
    const Trajectory traj =
        integrate(CrgdField(problem, c), x0, solver, sosp_monitor(problem, c, {true, 0}));
    BetaSweepRow& row = out.rows[i];
    row.beta = betas[i];
    row.status = traj.status.kind;
    row.t_end = traj.status.t;
    row.sosp = traj.converged();
    row.final_cost = traj.final().cost;
    row.steps = traj.accepted;
    row.rejected = traj.rejected;
    row.message = traj.message;
  });
  for (const BetaSweepRow& row : out.rows) {
    if (row.sosp) {
      if (!out.largest_success || row.beta > *out.largest_success) out.largest_success = row.beta;
    } else if (!out.smallest_failure || row.beta < *out.smallest_failure) {
      out.smallest_failure = row.beta;
    }
  }
  return out;
}

}  // namespace crgd
