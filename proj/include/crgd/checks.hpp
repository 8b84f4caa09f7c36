#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crgd {

// Outcome of one invariant check. `worst` is the largest observed error
// (or the smallest observed margin for lower-bound checks).
struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double tolerance = 0.0;
  int evaluated = 0;
  int skipped = 0;
  std::string detail;
};

struct PropertySuiteOptions {
  std::uint64_t seed = 7;
  int points = 100;    // random points per problem
  int matfac_n = 10;   // dimension of the randomly rotated factorization problem
};

CheckResult check_gradients(const PropertySuiteOptions& opt = {});
CheckResult check_hessians(const PropertySuiteOptions& opt = {});
CheckResult check_grad_phi(const PropertySuiteOptions& opt = {});
CheckResult check_wmin_closed_form(const PropertySuiteOptions& opt = {});
CheckResult check_eigmin_residual(const PropertySuiteOptions& opt = {});
CheckResult check_law_zero_rate();
CheckResult check_law_ode_residual();
CheckResult check_saddle_velocity();

// Every check above, in order.
std::vector<CheckResult> run_property_suite(const PropertySuiteOptions& opt = {});

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace crgd
