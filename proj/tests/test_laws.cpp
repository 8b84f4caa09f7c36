#include <gtest/gtest.h>

#include <cmath>

#include "crgd/laws.hpp"

using namespace crgd;

TEST(Laws, NamesRoundTrip) {
  for (const char* name : {"exponential", "finite", "fixed", "prescribed"}) {
    EXPECT_EQ(law_name(default_law(name)), name);
  }
  EXPECT_THROW(default_law("linear"), std::invalid_argument);
}

TEST(Laws, DefaultParameters) {
  EXPECT_DOUBLE_EQ(std::get<Exponential>(default_law("exponential")).c, 2.0);
  const auto fin = std::get<FiniteTime>(default_law("finite"));
  EXPECT_DOUBLE_EQ(fin.c, 2.0);
  EXPECT_DOUBLE_EQ(fin.alpha, 0.5);
  const auto fix = std::get<FixedTime>(default_law("fixed"));
  EXPECT_DOUBLE_EQ(fix.c1, 1.0);
  EXPECT_DOUBLE_EQ(fix.c2, 1.0);
  EXPECT_DOUBLE_EQ(fix.alpha, 0.5);
  EXPECT_DOUBLE_EQ(fix.p, 1.5);
  const auto pre = std::get<PrescribedTime>(default_law("prescribed"));
  EXPECT_DOUBLE_EQ(pre.T, 0.1);
  EXPECT_DOUBLE_EQ(pre.mu, 2.0);
}

TEST(Laws, SigmaValues) {
  EXPECT_DOUBLE_EQ(sigma(Exponential{2.0}, 0.5, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(sigma(FiniteTime{2.0, 0.5}, 4.0, 0.0), 4.0);
  EXPECT_DOUBLE_EQ(sigma(FixedTime{}, 4.0, 0.0), 2.0 + 8.0);
  EXPECT_DOUBLE_EQ(sigma(PrescribedTime{0.1, 2.0}, 1.0, 0.05), 40.0);
}

TEST(Laws, SigmaVanishesAtZero) {
  for (const char* name : {"exponential", "finite", "fixed", "prescribed"}) {
    for (double t : {0.0, 0.01, 0.09}) EXPECT_EQ(sigma(default_law(name), 0.0, t), 0.0) << name;
  }
}

TEST(Laws, SigmaDomain) {
  EXPECT_THROW(sigma(Exponential{}, -1e-3, 0.0), std::invalid_argument);
  EXPECT_THROW(sigma(PrescribedTime{}, 1.0, 0.1), std::domain_error);
}

TEST(Laws, Validation) {
  EXPECT_THROW(validate(Exponential{0.0}), std::invalid_argument);
  EXPECT_THROW(validate(FiniteTime{2.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(validate(FixedTime{1.0, 1.0, 0.5, 1.0}), std::invalid_argument);
  EXPECT_THROW(validate(PrescribedTime{0.1, 1.0}), std::invalid_argument);
  EXPECT_NO_THROW(validate(PrescribedTime{0.1, 2.0}));
}

TEST(ReferenceSolution, ClosedForms) {
  EXPECT_NEAR(reference_solution(Exponential{2.0}, 3.0, 0.5), 3.0 * std::exp(-1.0), 1e-15);
  // (sqrt(1) - 2 * 0.5 * 0.25)^2 = 0.5625
  EXPECT_NEAR(reference_solution(FiniteTime{2.0, 0.5}, 1.0, 0.25), 0.5625, 1e-15);
  EXPECT_EQ(reference_solution(FiniteTime{2.0, 0.5}, 1.0, 1.0), 0.0);
  EXPECT_NEAR(reference_solution(PrescribedTime{0.1, 2.0}, 2.0, 0.05), 0.5, 1e-15);
  EXPECT_EQ(reference_solution(PrescribedTime{0.1, 2.0}, 2.0, 0.2), 0.0);
}

TEST(ReferenceSolution, FixedTimeQuadratureOracle) {
  // mpmath quadrature and root finding in tools/oracles.py.
  const FixedTime law;
  EXPECT_NEAR(reference_solution(law, 1.0, 0.5), 0.35187608150048875, 1e-9);
  EXPECT_NEAR(reference_solution(law, 3.0, 0.25), 1.7404696975622704, 1e-9);
  EXPECT_NEAR(reference_solution(law, 3.0, 1.2), 0.23001937422517022, 1e-9);
  // Settles at 2 atan(sqrt(V0)).
  EXPECT_LT(reference_solution(law, 1.0, 1.5707963267948966 + 1e-6), 1e-9);
  EXPECT_EQ(reference_solution(law, 1.0, 5.0), 0.0);
}

TEST(ReferenceSolution, SatisfiesTheOde) {
  for (const char* name : {"exponential", "finite", "fixed", "prescribed"}) {
    const ConvergenceLaw law = default_law(name);
    const double V0 = 2.0;
    const double h = 1e-5;
    for (double t : {0.01, 0.03, 0.06}) {
      const double dv = (reference_solution(law, V0, t + h) - reference_solution(law, V0, t - h)) / (2 * h);
      const double s = sigma(law, reference_solution(law, V0, t), t);
      EXPECT_NEAR(dv, -s, 1e-5 * (1.0 + s)) << name << " t=" << t;
    }
  }
}

TEST(ReferenceSolution, MonotoneNonincreasing) {
  for (const char* name : {"exponential", "finite", "fixed", "prescribed"}) {
    const ConvergenceLaw law = default_law(name);
    double prev = reference_solution(law, 1.5, 0.0);
    EXPECT_DOUBLE_EQ(prev, 1.5);
    for (int k = 1; k <= 200; ++k) {
      const double v = reference_solution(law, 1.5, 0.01 * k);
      EXPECT_LE(v, prev) << name;
      EXPECT_GE(v, 0.0);
      prev = v;
    }
  }
}

TEST(SettlingBound, Values) {
  EXPECT_FALSE(settling_bound(Exponential{}, 1.0).has_value());
  EXPECT_DOUBLE_EQ(*settling_bound(FiniteTime{2.0, 0.5}, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(*settling_bound(FixedTime{}, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(*settling_bound(FixedTime{}, 1e6), 4.0);
  EXPECT_DOUBLE_EQ(*settling_bound(PrescribedTime{}, 1.0), 0.1);
  // The uniform bound dominates the exact settling time 2 atan(sqrt(V0)).
  EXPECT_LT(2.0 * std::atan(std::sqrt(1e6)), 4.0);
}

TEST(TimeLimit, OnlyPrescribedIsBounded) {
  EXPECT_TRUE(std::isinf(time_limit(Exponential{})));
  EXPECT_DOUBLE_EQ(time_limit(PrescribedTime{0.1, 2.0}), 0.1 * (1.0 - kPrescribedClamp));
}
