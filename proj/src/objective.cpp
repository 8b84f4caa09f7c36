#include "crgd/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>
#include <stdexcept>
#include <string>

#include <boost/math/tools/roots.hpp>

namespace crgd {

namespace {

void require_dim(const Vector& x, int n, const char* who) {
  if (x.size() != n) {
    throw std::invalid_argument(std::string(who) + ": expected a vector of dimension " +
                                std::to_string(n) + ", got " + std::to_string(x.size()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Three-fold potential

void ThreeFoldParams::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("threefold: eta must be positive, got " + std::to_string(eta));
  }
}

ThreeFoldObjective::ThreeFoldObjective(ThreeFoldParams params) : params_(params) {
  params_.validate();
}

double ThreeFoldObjective::value(const Vector& x) const {
  require_dim(x, 2, "threefold");
  const double x1 = x(0), x2 = x(1);
  const double r2 = x1 * x1 + x2 * x2;
  return 0.5 * r2 + 0.25 * r2 * r2 - params_.eta * (x1 * x1 * x1 - 3.0 * x1 * x2 * x2);
}

Vector ThreeFoldObjective::gradient(const Vector& x) const {
  require_dim(x, 2, "threefold");
  const double x1 = x(0), x2 = x(1), eta = params_.eta;
  const double r2 = x1 * x1 + x2 * x2;
  Vector g(2);
  g(0) = x1 + r2 * x1 - eta * (3.0 * x1 * x1 - 3.0 * x2 * x2);
  g(1) = x2 + r2 * x2 + 6.0 * eta * x1 * x2;
  return g;
}

Matrix ThreeFoldObjective::hessian(const Vector& x) const {
  require_dim(x, 2, "threefold");
  const double x1 = x(0), x2 = x(1), eta = params_.eta;
  const double r2 = x1 * x1 + x2 * x2;
  Matrix h(2, 2);
  h(0, 0) = 1.0 + r2 + 2.0 * x1 * x1 - 6.0 * eta * x1;
  h(1, 1) = 1.0 + r2 + 2.0 * x2 * x2 + 6.0 * eta * x1;
  h(0, 1) = h(1, 0) = 2.0 * x1 * x2 + 6.0 * eta * x2;
  return h;
}

double ThreeFoldObjective::saddle_radius() const {
  const double b = 3.0 * params_.eta;
  const double disc = b * b - 4.0;
  if (disc < 0.0) {
    throw std::domain_error("threefold: no saddle ring for eta <= 2/3");
  }
  // Smaller root written as 2 / (b + sqrt(disc)) to avoid cancellation.
  return 2.0 / (b + std::sqrt(disc));
}

double ThreeFoldObjective::outer_minimum_radius() const {
  const double b = 3.0 * params_.eta;
  const double disc = b * b - 4.0;
  if (disc < 0.0) {
    throw std::domain_error("threefold: no outer minima for eta <= 2/3");
  }
  return 0.5 * (b + std::sqrt(disc));
}

ObjectivePtr threefold_problem(const ThreeFoldParams& params) {
  return std::make_shared<ThreeFoldObjective>(params);
}

// ---------------------------------------------------------------------------
// Matrix factorization

void MatFacParams::validate() const {
  const int n = dim();
  if (n < 3) {
    throw std::invalid_argument("matfac: dimension must be at least 3, got " + std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(spectrum(i)) || spectrum(i) < 0.0) {
      throw std::invalid_argument("matfac: spectrum entries must be finite and nonnegative");
    }
    if (i > 0 && !(spectrum(i) < spectrum(i - 1))) {
      throw std::invalid_argument("matfac: spectrum must be strictly decreasing (index " +
                                  std::to_string(i) + ")");
    }
  }
  if (basis.rows() != n || basis.cols() != n) {
    throw std::invalid_argument("matfac: basis must be " + std::to_string(n) + "x" +
                                std::to_string(n));
  }
  const double err = (basis.transpose() * basis - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(err <= 1e-12)) {
    throw std::invalid_argument("matfac: basis is not orthogonal (max |V^T V - I| = " +
                                std::to_string(err) + ")");
  }
}

Vector default_spectrum(int n, double delta) {
  if (n < 3) {
    throw std::invalid_argument("default_spectrum: n must be at least 3");
  }
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("default_spectrum: delta must lie in (0, 1)");
  }
  Vector s(n);
  s(0) = 1.0;
  s(1) = 1.0 - delta;
  for (int i = 3; i <= n; ++i) {
    s(i - 1) = 0.5 * static_cast<double>(n - i) / static_cast<double>(n - 2);
  }
  if (!(s(1) > s(2))) {
    throw std::invalid_argument("default_spectrum: delta = " + std::to_string(delta) +
                                " leaves lambda_2 <= lambda_3");
  }
  return s;
}

Matrix random_orthogonal(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      a(i, j) = normal(rng);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  // Fix column signs against R's diagonal so the factorization is unique.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

MatFacParams default_matfac_params(int n, double delta) {
  MatFacParams p;
  p.spectrum = default_spectrum(n, delta);
  p.basis = Matrix::Identity(n, n);
  return p;
}

MatFacObjective::MatFacObjective(MatFacParams params) : params_(std::move(params)) {
  params_.validate();
  target_ = params_.basis * params_.spectrum.asDiagonal() * params_.basis.transpose();
  target_ = 0.5 * (target_ + target_.transpose()).eval();
  target_norm_sq_ = target_.squaredNorm();
  identity_basis_ = params_.basis.isIdentity(0.0);
}

Vector MatFacObjective::apply_target(const Vector& x) const {
  if (identity_basis_) return params_.spectrum.cwiseProduct(x);
  return target_ * x;
}

Vector MatFacObjective::to_eigenbasis(const Vector& x) const {
  if (identity_basis_) return x;
  return params_.basis.transpose() * x;
}

Vector MatFacObjective::from_eigenbasis(const Vector& y) const {
  if (identity_basis_) return y;
  return params_.basis * y;
}

double MatFacObjective::value(const Vector& x) const {
  require_dim(x, dim(), "matfac");
  const double r2 = x.squaredNorm();
  const double xmx = x.dot(apply_target(x));
  // ||x x^T - M||_F^2 = |x|^4 - 2 x^T M x + ||M||_F^2
  return 0.25 * (r2 * r2 - 2.0 * xmx + target_norm_sq_);
}

Vector MatFacObjective::gradient(const Vector& x) const {
  require_dim(x, dim(), "matfac");
  return x.squaredNorm() * x - apply_target(x);
}

Matrix MatFacObjective::hessian(const Vector& x) const {
  require_dim(x, dim(), "matfac");
  Matrix h = 2.0 * x * x.transpose() - target_;
  h.diagonal().array() += x.squaredNorm();
  return h;
}

std::optional<Vector> MatFacObjective::curvature_sensitivity(const Vector& x,
                                                             const Vector& u) const {
  return 2.0 * x + 4.0 * x.dot(u) * u;
}

std::optional<EigenPair> MatFacObjective::smallest_eigenpair(const Vector& x) const {
  require_dim(x, dim(), "matfac");
  const Vector& lam = params_.spectrum;
  const Vector y = to_eigenbasis(x);
  const double r2 = x.squaredNorm();
  const int n = dim();

  // Root of the secular equation in (d_k, d_{k+1}), d_i = r2 - lam_i ascending.
  // The root is written as origin + tau with the origin at the nearer pole so
  // that d_i - mu = (lam_o - lam_i) - tau keeps full relative accuracy.
  struct Root {
    double mu;
    int origin;
    double tau;
    bool deflated;
  };
  auto solve = [&](int k, int bits) -> Root {
    auto f = [&](int o, double tau) {
      double s = 1.0;
      for (int i = 0; i < n; ++i) s += 2.0 * y(i) * y(i) / ((lam(o) - lam(i)) - tau);
      return s;
    };
    const double gap = lam(k) - lam(k + 1);
    const int o = f(k, 0.5 * gap) >= 0.0 ? k : k + 1;
    // tau * f(tau) has no pole at the origin: it is -2 y_o^2 at tau = 0 and
    // positive at the far end of the half interval.
    auto h = [&](double tau) {
      double s = tau - 2.0 * y(o) * y(o);
      for (int i = 0; i < n; ++i) {
        if (i != o) s += tau * 2.0 * y(i) * y(i) / ((lam(o) - lam(i)) - tau);
      }
      return s;
    };
    const double far = (o == k ? 0.5 : -0.5) * gap;
    if (y(o) == 0.0) return {r2 - lam(o), o, 0.0, true};
    if (h(far) == 0.0) return {r2 - lam(o) + far, o, far, false};
    boost::math::tools::eps_tolerance<double> tol(bits);
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(h, std::min(0.0, far),
                                                          std::max(0.0, far), tol, iters);
    const double tau = 0.5 * (a + b);
    return {r2 - lam(o) + tau, o, tau, false};
  };

  // The second root only feeds the gap diagnostic.
  const Root first = solve(0, std::numeric_limits<double>::digits - 2);
  const Root second = solve(1, 30);
  Vector v(n);
  if (first.deflated) {
    v.setZero();
    v(first.origin) = 1.0;
  } else {
    for (int i = 0; i < n; ++i) v(i) = y(i) / ((lam(first.origin) - lam(i)) - first.tau);
  }
  EigenPair out;
  out.lambda_min = first.mu;
  out.gap_to_next = second.mu - first.mu;
  out.u_min = from_eigenbasis(v).normalized();
  Eigen::Index k = 0;
  out.u_min.cwiseAbs().maxCoeff(&k);
  if (out.u_min(k) < 0.0) out.u_min = -out.u_min;
  return out;
}

ObjectivePtr matfac_problem(const MatFacParams& params) {
  return std::make_shared<MatFacObjective>(params);
}

// ---------------------------------------------------------------------------
// Finite differences

double default_gradient_step(const Vector& x) { return 1e-5 * (1.0 + x.norm()); }

double default_hessian_step(const Vector& x) { return 1e-4 * (1.0 + x.norm()); }

Vector fd_grad(const Objective& problem, const Vector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_grad: step must be positive");
  const int n = static_cast<int>(x.size());
  Vector g(n);
  Vector xp = x, xm = x;
  for (int j = 0; j < n; ++j) {
    xp(j) = x(j) + h;
    xm(j) = x(j) - h;
    g(j) = (problem.value(xp) - problem.value(xm)) / (2.0 * h);
    xp(j) = xm(j) = x(j);
  }
  return g;
}

Matrix fd_hess(const Objective& problem, const Vector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_hess: step must be positive");
  const int n = static_cast<int>(x.size());
  Matrix a(n, n);
  Vector xp = x, xm = x;
  for (int j = 0; j < n; ++j) {
    xp(j) = x(j) + h;
    xm(j) = x(j) - h;
    a.col(j) = (problem.gradient(xp) - problem.gradient(xm)) / (2.0 * h);
    xp(j) = xm(j) = x(j);
  }
  return 0.5 * (a + a.transpose());
}

}  // namespace crgd
