#pragma once

#include <map>
#include <string>
#include <vector>

#include "crgd/checks.hpp"
#include "crgd/experiments.hpp"

namespace crgd {

// Verdict for one numbered acceptance criterion.
struct CriterionOutcome {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double runtime_s = 0.0;
  double runtime_limit_s = 0.0;  // 0: no limit
};

// Wall-clock budget per criterion in seconds (0 when none applies).
double runtime_limit(int criterion);

// Records the runtime and fails the outcome if it exceeds the budget.
void apply_runtime(CriterionOutcome& outcome, double seconds);

// One line: "[PASS] criterion N (title): detail [runtime x s / limit y s]".
std::string format_outcome(const CriterionOutcome& outcome);

// GD SOSP rates (%) at the 1000 s horizon from the reference Monte Carlo study.
inline const std::map<double, double> kReferenceGdRates = {
    {0.1, 99.0}, {0.005, 97.0}, {0.002, 91.0}, {0.001, 80.0}};

CriterionOutcome evaluate_threefold(const ThreeFoldComparison& run, const ThreeFoldParams& params);
CriterionOutcome evaluate_rate_profiles(const RateProfiles& profiles);
CriterionOutcome evaluate_gap_sweep(const GapSweepResult& result);
// GD rates are compared at T = 10 and T = 1000 when those horizons are present.
CriterionOutcome evaluate_monte_carlo(const MonteCarloReport& report);
CriterionOutcome evaluate_grid_scan(const GridScanResult& result);
CriterionOutcome evaluate_property_suite(const std::vector<CheckResult>& results);
// Asserts success for every beta <= 100 that was run; larger betas are only
// reported through the observed bracket.
CriterionOutcome evaluate_beta_sweep(const BetaSweepResult& result);

}  // namespace crgd
