#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crgd/objective.hpp"

using namespace crgd;

namespace {

// Values from tools/oracles.py (sympy / mpmath).
constexpr double kSaddleRadius = 0.72984378812835757;
constexpr double kOuterRadius = 1.3701562118716424;
constexpr double kSaddleCost = 0.065133708201790345;
constexpr double kOuterCost = 0.019191291798209655;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(ThreeFold, ValueGradientHessianAtReferencePoint) {
  const ThreeFoldObjective f(ThreeFoldParams{0.7});
  const Vector x = vec({0.3, -0.7});
  EXPECT_NEAR(f.value(x), 0.6639, 1e-14);
  const Vector g = f.gradient(x);
  EXPECT_NEAR(g(0), 1.314, 1e-14);
  EXPECT_NEAR(g(1), -1.988, 1e-14);
  const Matrix h = f.hessian(x);
  EXPECT_NEAR(h(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(h(0, 1), -3.36, 1e-14);
  EXPECT_NEAR(h(1, 0), -3.36, 1e-14);
  EXPECT_NEAR(h(1, 1), 3.82, 1e-14);
}

TEST(ThreeFold, CriticalRadii) {
  const ThreeFoldObjective f(ThreeFoldParams{0.7});
  EXPECT_NEAR(f.saddle_radius(), kSaddleRadius, 1e-14);
  EXPECT_NEAR(f.outer_minimum_radius(), kOuterRadius, 1e-14);
  EXPECT_NEAR(f.value(vec({kSaddleRadius, 0.0})), kSaddleCost, 1e-14);
  EXPECT_NEAR(f.value(vec({kOuterRadius, 0.0})), kOuterCost, 1e-14);
}

TEST(ThreeFold, ThreefoldSymmetry) {
  const ThreeFoldObjective f(ThreeFoldParams{0.7});
  const double a = 2.0 * M_PI / 3.0;
  Matrix rot(2, 2);
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    const Vector x = vec({u(rng), u(rng)});
    EXPECT_NEAR(f.value(rot * x), f.value(x), 1e-12);
    // Gradients rotate with the point.
    EXPECT_LT((f.gradient(rot * x) - rot * f.gradient(x)).norm(), 1e-11);
  }
}

TEST(ThreeFold, GradientVanishesAtSaddlesAndMinima) {
  const ThreeFoldObjective f(ThreeFoldParams{0.7});
  for (double r : {0.0, kSaddleRadius, kOuterRadius}) {
    for (int k = 0; k < 3; ++k) {
      const double a = 2.0 * M_PI * k / 3.0;
      EXPECT_LT(f.gradient(vec({r * std::cos(a), r * std::sin(a)})).norm(), 1e-13);
    }
  }
}

TEST(ThreeFold, ParameterDomain) {
  EXPECT_THROW(ThreeFoldObjective(ThreeFoldParams{-0.1}), std::invalid_argument);
  // Below 2/3 the landscape has no saddle ring.
  EXPECT_THROW(ThreeFoldObjective(ThreeFoldParams{0.5}).saddle_radius(), std::domain_error);
}

TEST(MatFac, DefaultSpectrum) {
  const Vector s = default_spectrum(4, 0.1);
  ASSERT_EQ(s.size(), 4);
  EXPECT_DOUBLE_EQ(s(0), 1.0);
  EXPECT_DOUBLE_EQ(s(1), 0.9);
  EXPECT_DOUBLE_EQ(s(2), 0.25);
  EXPECT_DOUBLE_EQ(s(3), 0.0);
  const Vector s50 = default_spectrum(50, 0.01);
  EXPECT_DOUBLE_EQ(s50(2), 0.5 * 47.0 / 48.0);
  EXPECT_DOUBLE_EQ(s50(49), 0.0);
}

TEST(MatFac, ValueAndGradientAtReferencePoint) {
  const MatFacObjective f(default_matfac_params(4, 0.1));
  const Vector x = vec({0.3, -0.2, 0.5, 0.1});
  EXPECT_NEAR(f.value(x), 0.4119, 1e-14);
  const Vector g = f.gradient(x);
  const Vector expected = vec({-0.183, 0.102, 0.07, 0.039});
  EXPECT_LT((g - expected).norm(), 1e-14);
}

TEST(MatFac, GlobalMinimumCost) {
  const MatFacObjective f(default_matfac_params(50, 0.01));
  EXPECT_NEAR(f.value(Vector::Zero(50)), 1.4639920138888889, 1e-13);
  EXPECT_NEAR(f.value(f.eigenvector(0)), 1.2139920138888889, 1e-13);
  EXPECT_LT(f.gradient(f.eigenvector(0)).norm(), 1e-14);
}

TEST(MatFac, RotationInvariance) {
  // J(Vx) under basis V equals J(x) under the identity basis.
  MatFacParams rotated = default_matfac_params(6, 0.1);
  rotated.basis = random_orthogonal(6, 11);
  const MatFacObjective fr(rotated);
  const MatFacObjective fi(default_matfac_params(6, 0.1));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int k = 0; k < 10; ++k) {
    Vector x(6);
    for (int i = 0; i < 6; ++i) x(i) = n(rng);
    EXPECT_NEAR(fr.value(rotated.basis * x), fi.value(x), 1e-12);
  }
}

TEST(MatFac, RandomOrthogonalIsOrthogonalAndSeeded) {
  const Matrix q = random_orthogonal(8, 42);
  EXPECT_LT((q.transpose() * q - Matrix::Identity(8, 8)).norm(), 1e-13);
  EXPECT_EQ(q, random_orthogonal(8, 42));
  EXPECT_NE(q, random_orthogonal(8, 43));
}

TEST(MatFac, ValidatesParameters) {
  MatFacParams p = default_matfac_params(4, 0.1);
  p.spectrum(1) = 1.0;  // not strictly decreasing
  EXPECT_THROW(MatFacObjective{p}, std::invalid_argument);
}

TEST(FiniteDifferences, MatchAnalyticDerivatives) {
  const MatFacObjective f(default_matfac_params(5, 0.2));
  const Vector x = vec({0.4, -0.1, 0.3, 0.2, -0.5});
  const Vector g = f.gradient(x);
  EXPECT_LT((fd_grad(f, x, default_gradient_step(x)) - g).norm(), 1e-8 * (1.0 + g.norm()));
  const Matrix h = f.hessian(x);
  EXPECT_LT((fd_hess(f, x, default_hessian_step(x)) - h).norm(), 1e-7 * (1.0 + h.norm()));
}
