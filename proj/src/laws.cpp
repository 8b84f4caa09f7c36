#include "crgd/laws.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace crgd {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

// With s = V^(1 - alpha) the separable integral dt = -dV / sigma(V) becomes
// dt = -ds / ((1 - alpha)(c1 + c2 V^(p - alpha))), which is smooth on [0, s0].
double fixed_time_elapsed(const FixedTime& law, double s_lo, double s_hi) {
  if (s_hi <= s_lo) return 0.0;
  const double one_m_a = 1.0 - law.alpha;
  const double expo = (law.p - law.alpha) / one_m_a;
  auto f = [&](double s) { return 1.0 / (one_m_a * (law.c1 + law.c2 * std::pow(s, expo))); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, s_lo, s_hi, 8, 1e-12,
                                                                       &err);
}

double fixed_time_solution(const FixedTime& law, double V0, double t) {
  if (V0 <= 0.0) return 0.0;
  if (t <= 0.0) return V0;
  const double one_m_a = 1.0 - law.alpha;
  const double s0 = std::pow(V0, one_m_a);
  const double settle = fixed_time_elapsed(law, 0.0, s0);
  if (t >= settle) return 0.0;
  // Elapsed time from s0 down to s is decreasing in s; bracket on [0, s0].
  auto residual = [&](double s) { return fixed_time_elapsed(law, s, s0) - t; };
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 3);
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(residual, 0.0, s0, settle - t, -t, tol,
                                                          iters);
  const double s = 0.5 * (lo + hi);
  return std::pow(s, 1.0 / one_m_a);
}

}  // namespace

void validate(const ConvergenceLaw& law) {
  std::visit(overloaded{
                 [](const Exponential& l) { require(l.c > 0.0, "exponential law: c must be > 0"); },
                 [](const FiniteTime& l) {
                   require(l.c > 0.0, "finite-time law: c must be > 0");
                   require(l.alpha > 0.0 && l.alpha < 1.0,
                           "finite-time law: alpha must lie in (0, 1)");
                 },
                 [](const FixedTime& l) {
                   require(l.c1 > 0.0 && l.c2 > 0.0, "fixed-time law: c1, c2 must be > 0");
                   require(l.alpha > 0.0 && l.alpha < 1.0 && l.p > 1.0,
                           "fixed-time law: need 0 < alpha < 1 < p");
                 },
                 [](const PrescribedTime& l) {
                   require(l.T > 0.0, "prescribed-time law: T must be > 0");
                   require(l.mu > 1.0, "prescribed-time law: mu must be > 1");
                 },
             },
             law);
}

std::string law_name(const ConvergenceLaw& law) {
  return std::visit(overloaded{
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const FiniteTime&) { return std::string("finite"); },
                        [](const FixedTime&) { return std::string("fixed"); },
                        [](const PrescribedTime&) { return std::string("prescribed"); },
                    },
                    law);
}

ConvergenceLaw default_law(const std::string& name) {
  if (name == "exponential") return Exponential{};
  if (name == "finite") return FiniteTime{};
  if (name == "fixed") return FixedTime{};
  if (name == "prescribed") return PrescribedTime{};
  throw std::invalid_argument("unknown convergence law '" + name +
                              "' (expected exponential, finite, fixed or prescribed)");
}

double time_limit(const ConvergenceLaw& law) {
  if (const auto* l = std::get_if<PrescribedTime>(&law)) return l->T * (1.0 - kPrescribedClamp);
  return std::numeric_limits<double>::infinity();
}

double sigma(const ConvergenceLaw& law, double V, double t) {
  if (!(V >= 0.0)) throw std::invalid_argument("sigma: V must be nonnegative");
  return std::visit(overloaded{
                        [&](const Exponential& l) { return l.c * V; },
                        [&](const FiniteTime& l) { return l.c * std::pow(V, l.alpha); },
                        [&](const FixedTime& l) {
                          return l.c1 * std::pow(V, l.alpha) + l.c2 * std::pow(V, l.p);
                        },
                        [&](const PrescribedTime& l) {
                          if (!(t < l.T)) {
                            throw std::domain_error("sigma: prescribed-time gain undefined for t >= T");
                          }
                          return l.mu * V / (l.T - t);
                        },
                    },
                    law);
}

double reference_solution(const ConvergenceLaw& law, double V0, double t) {
  if (!(V0 >= 0.0)) throw std::invalid_argument("reference_solution: V0 must be nonnegative");
  if (!(t >= 0.0)) throw std::invalid_argument("reference_solution: t must be nonnegative");
  return std::visit(overloaded{
                        [&](const Exponential& l) { return V0 * std::exp(-l.c * t); },
                        [&](const FiniteTime& l) {
                          const double e = 1.0 - l.alpha;
                          const double base = std::pow(V0, e) - l.c * e * t;
                          return base > 0.0 ? std::pow(base, 1.0 / e) : 0.0;
                        },
                        [&](const FixedTime& l) { return fixed_time_solution(l, V0, t); },
                        [&](const PrescribedTime& l) {
                          return t < l.T ? V0 * std::pow((l.T - t) / l.T, l.mu) : 0.0;
                        },
                    },
                    law);
}

std::optional<double> settling_bound(const ConvergenceLaw& law, double V0) {
  if (!(V0 >= 0.0)) throw std::invalid_argument("settling_bound: V0 must be nonnegative");
  return std::visit(overloaded{
                        [](const Exponential&) -> std::optional<double> { return std::nullopt; },
                        [&](const FiniteTime& l) -> std::optional<double> {
                          return std::pow(V0, 1.0 - l.alpha) / (l.c * (1.0 - l.alpha));
                        },
                        [](const FixedTime& l) -> std::optional<double> {
                          return 1.0 / (l.c1 * (1.0 - l.alpha)) + 1.0 / (l.c2 * (l.p - 1.0));
                        },
                        [](const PrescribedTime& l) -> std::optional<double> { return l.T; },
                    },
                    law);
}

}  // namespace crgd
