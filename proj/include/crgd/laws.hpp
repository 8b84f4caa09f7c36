#pragma once

#include <optional>
#include <string>
#include <variant>

namespace crgd {

// Decay laws sigma(V, t) for dV/dt = -sigma(V, t). Defaults are the
// benchmark parameters used throughout the experiments.
struct Exponential {
  double c = 2.0;
};
struct FiniteTime {
  double c = 2.0;
  double alpha = 0.5;
};
struct FixedTime {
  double c1 = 1.0;
  double c2 = 1.0;
  double alpha = 0.5;
  double p = 1.5;
};
struct PrescribedTime {
  double T = 0.1;
  double mu = 2.0;
};

using ConvergenceLaw = std::variant<Exponential, FiniteTime, FixedTime, PrescribedTime>;

// Throws std::invalid_argument when parameters leave their admissible ranges.
void validate(const ConvergenceLaw& law);

// "exponential", "finite", "fixed", "prescribed".
std::string law_name(const ConvergenceLaw& law);
ConvergenceLaw default_law(const std::string& name);

// Prescribed-time laws are never evaluated past T (1 - 1e-6).
inline constexpr double kPrescribedClamp = 1e-6;

// Latest time at which the law may be evaluated: T (1 - 1e-6) for
// prescribed-time laws, +infinity otherwise.
double time_limit(const ConvergenceLaw& law);

// Requires V >= 0; prescribed-time laws also require t < T.
double sigma(const ConvergenceLaw& law, double V, double t);

// Solution of dV/dt = -sigma(V, t), V(0) = V0, for t >= 0. Fixed-time laws
// have no elementary solution; they are evaluated by inverting the adaptive
// Gauss-Kronrod quadrature of the separable integral.
double reference_solution(const ConvergenceLaw& law, double V0, double t);

// Settling time, or nullopt when V only decays asymptotically (exponential law).
std::optional<double> settling_bound(const ConvergenceLaw& law, double V0);

}  // namespace crgd
