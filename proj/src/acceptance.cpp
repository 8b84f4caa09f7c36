#include "crgd/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <variant>

#include "crgd/curvature.hpp"

namespace crgd {

namespace {

bool in_range(double v, double lo, double hi) { return v >= lo && v <= hi; }

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

double runtime_limit(int criterion) {
  switch (criterion) {
    case 1: return 5.0;
    case 2: return 30.0;
    case 3: return 300.0;
    case 4: return 900.0;
    case 5: return 60.0;
    case 6: return 30.0;
    default: return 0.0;
  }
}

void apply_runtime(CriterionOutcome& outcome, double seconds) {
  outcome.runtime_s = seconds;
  outcome.runtime_limit_s = runtime_limit(outcome.id);
  if (outcome.runtime_limit_s > 0.0 && seconds > outcome.runtime_limit_s) {
    outcome.passed = false;
    outcome.detail += "; runtime over budget";
  }
}

std::string format_outcome(const CriterionOutcome& o) {
  std::ostringstream s;
  s << (o.passed ? "[PASS]" : "[FAIL]") << " criterion " << o.id << " (" << o.title
    << "): " << o.detail << " [runtime " << fmt(o.runtime_s) << " s";
  if (o.runtime_limit_s > 0.0) s << " / limit " << fmt(o.runtime_limit_s) << " s";
  s << ']';
  return s.str();
}

CriterionOutcome evaluate_threefold(const ThreeFoldComparison& run, const ThreeFoldParams& params) {
  CriterionOutcome out;
  out.id = 1;
  out.title = "three-fold trajectory split";
  const ThreeFoldObjective problem(params);
  const Vector& xg = run.gd.final().x;
  const Vector& xc = run.crgd.final().x;
  const double jg = problem.value(xg), jc = problem.value(xc);
  const double lg = hessian_eigmin(problem, xg).lambda_min;
  const double lc = hessian_eigmin(problem, xc).lambda_min;

  const bool gd_ok = run.gd.status.kind == Termination::SaddleStall &&
                     in_range(jg, 0.062, 0.068) && in_range(lg, -0.52, -0.42);
  const bool crgd_ok = run.crgd.converged() && in_range(jc, 0.017, 0.021) &&
                       in_range(lc, 0.8, 0.96);
  out.passed = gd_ok && crgd_ok;
  out.detail = "GD " + to_string(run.gd.status.kind) + " J=" + fmt(jg) + " lambda_min=" + fmt(lg) +
               "; CRGD " + to_string(run.crgd.status.kind) + " J=" + fmt(jc) +
               " lambda_min=" + fmt(lc);
  return out;
}

CriterionOutcome evaluate_rate_profiles(const RateProfiles& profiles) {
  CriterionOutcome out;
  out.id = 2;
  out.title = "rate tracking";
  out.passed = profiles.crgd.size() == 4;
  std::ostringstream d;
  for (const RateProfile& p : profiles.crgd) {
    bool ok = p.compared_samples > 0 && p.max_rel_error <= 0.02;
    d << law_name(p.law) << " err=" << fmt(p.max_rel_error) << " (" << p.compared_samples
      << " samples)";
    if (const auto* pt = std::get_if<PrescribedTime>(&p.law)) {
      ok = ok && p.trajectory.converged() && p.plateau_time <= pt->T;
      d << " plateau t=" << fmt(p.plateau_time) << " <= " << fmt(pt->T);
    }
    if (std::holds_alternative<FixedTime>(p.law)) {
      const double bound = settling_bound(p.law, p.v0).value_or(0.0);
      ok = ok && p.trajectory.converged() && p.plateau_time <= bound;
      d << " plateau t=" << fmt(p.plateau_time) << " <= " << fmt(bound);
    }
    if (!ok) d << " FAILED";
    d << "; ";
    out.passed = out.passed && ok;
  }
  out.detail = d.str();
  if (out.detail.size() >= 2) out.detail.resize(out.detail.size() - 2);
  return out;
}

CriterionOutcome evaluate_gap_sweep(const GapSweepResult& result) {
  CriterionOutcome out;
  out.id = 3;
  out.title = "gap scaling";
  bool all_converged = !result.rows.empty();
  bool decreasing = true;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const GapSweepRow& r = result.rows[i];
    all_converged = all_converged && r.status_gd == Termination::ConvergedSOSP &&
                    r.status_crgd == Termination::ConvergedSOSP;
    // Rows are ordered by decreasing delta.
    if (i > 0) decreasing = decreasing && r.t_conv_crgd < result.rows[i - 1].t_conv_crgd;
  }
  const double sg = result.fit_gd.slope, sc = result.fit_crgd.slope;
  out.passed = all_converged && decreasing && in_range(sg, -1.15, -0.85) && in_range(sc, 0.6, 1.4);
  out.detail = "GD slope=" + fmt(sg) + " in [-1.15, -0.85]; CRGD slope=" + fmt(sc) +
               " in [0.6, 1.4]; CRGD t_conv strictly decreasing: " + (decreasing ? "yes" : "no") +
               "; all runs converged: " + (all_converged ? "yes" : "no");
  return out;
}

CriterionOutcome evaluate_monte_carlo(const MonteCarloReport& report) {
  CriterionOutcome out;
  out.id = 4;
  out.title = "Monte Carlo SOSP rates";
  out.passed = !report.cells.empty();
  bool saw_short = false, saw_long = false;
  std::ostringstream d;
  for (const MonteCarloCell& c : report.cells) {
    bool ok = true;
    if (c.method == "crgd") {
      ok = c.sosp_count == c.trials;
    } else if (same_value(c.horizon, 10.0)) {
      saw_short = true;
      ok = c.sosp_count == 0;
    } else if (same_value(c.horizon, 1000.0)) {
      saw_long = true;
      const auto ref = std::find_if(kReferenceGdRates.begin(), kReferenceGdRates.end(),
                                    [&](const auto& kv) { return same_value(c.delta, kv.first); });
      if (ref != kReferenceGdRates.end()) {
        ok = std::abs(c.rate_percent() - ref->second) <= 10.0;
        d << "GD delta=" << fmt(c.delta) << " T=1000: " << fmt(c.rate_percent())
          << "% vs reference " << fmt(ref->second) << "%; ";
      }
    }
    if (c.method == "crgd" || !same_value(c.horizon, 1000.0)) {
      d << c.method << " delta=" << fmt(c.delta) << " T=" << fmt(c.horizon) << ": "
        << fmt(c.rate_percent()) << "%; ";
    }
    out.passed = out.passed && ok;
  }
  if (!saw_short || !saw_long) {
    out.passed = false;
    d << "horizons 10 and 1000 are both required; ";
  }
  out.detail = d.str();
  if (out.detail.size() >= 2) out.detail.resize(out.detail.size() - 2);
  return out;
}

CriterionOutcome evaluate_grid_scan(const GridScanResult& result) {
  CriterionOutcome out;
  out.id = 5;
  out.title = "spurious-point scan";
  out.passed = result.min_grad_phi > 1e-4;
  std::ostringstream d;
  d << result.resolution << "x" << result.resolution << " mesh, " << result.negative_cells
    << " negative-curvature cells, min |grad Phi|=" << fmt(result.min_grad_phi) << " > 1e-4";
  if (result.argmin.size() == 2) {
    d << " at (" << fmt(result.argmin(0)) << ", " << fmt(result.argmin(1)) << ")";
  }
  out.detail = d.str();
  return out;
}

CriterionOutcome evaluate_property_suite(const std::vector<CheckResult>& results) {
  CriterionOutcome out;
  out.id = 6;
  out.title = "property suite";
  out.passed = all_passed(results);
  std::ostringstream d;
  for (const CheckResult& r : results) {
    d << r.name << (r.passed ? " ok" : " FAILED") << " (worst " << fmt(r.worst) << ", tol "
      << fmt(r.tolerance) << "); ";
  }
  out.detail = d.str();
  if (out.detail.size() >= 2) out.detail.resize(out.detail.size() - 2);
  return out;
}

CriterionOutcome evaluate_beta_sweep(const BetaSweepResult& result) {
  CriterionOutcome out;
  out.id = 7;
  out.title = "beta bracketing";
  out.passed = true;
  std::ostringstream d;
  for (double beta : {1.0, 10.0, 50.0, 100.0}) {
    const auto row = std::find_if(result.rows.begin(), result.rows.end(),
                                  [&](const BetaSweepRow& r) { return same_value(r.beta, beta); });
    if (row == result.rows.end()) {
      out.passed = false;
      d << "beta=" << fmt(beta) << " not run; ";
      continue;
    }
    const bool ok = row->status == Termination::ConvergedSOSP && row->sosp;
    out.passed = out.passed && ok;
    d << "beta=" << fmt(beta) << " " << to_string(row->status) << " (" << row->steps
      << " steps); ";
  }
  d << "observed bracket: largest success "
    << (result.largest_success ? fmt(*result.largest_success) : std::string("none"))
    << ", smallest failure "
    << (result.smallest_failure ? fmt(*result.smallest_failure) : std::string("none"));
  out.detail = d.str();
  return out;
}

}  // namespace crgd
