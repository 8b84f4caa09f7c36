#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace crgd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Smallest eigenpair of a symmetric matrix.
struct EigenPair {
  double lambda_min = 0.0;
  Vector u_min;              // unit norm; largest-magnitude component is positive
  double gap_to_next = 0.0;  // lambda_2 - lambda_1, zero for 1x1 input
};

// Smooth objective J : R^n -> R with analytic first and second derivatives.
//
// Implementations are immutable after construction; every member is a pure
// function of its arguments, so a single instance may be shared by any number
// of concurrent integrations.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;

  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  // Symmetric n x n Hessian.
  virtual Matrix hessian(const Vector& x) const = 0;

  // Closed-form curvature sensitivity u^T (dH/dx_j) u for a unit vector u, when
  // the landscape admits one. The default signals that callers must fall back
  // to differencing the Hessian.
  virtual std::optional<Vector> curvature_sensitivity(const Vector& x, const Vector& u) const {
    (void)x;
    (void)u;
    return std::nullopt;
  }

  // Smallest Hessian eigenpair from landscape structure, when cheaper than a
  // dense eigendecomposition.
  virtual std::optional<EigenPair> smallest_eigenpair(const Vector& x) const {
    (void)x;
    return std::nullopt;
  }
};

using ObjectivePtr = std::shared_ptr<const Objective>;

// ---------------------------------------------------------------------------
// Three-fold symmetric potential
//   J(x) = 1/2 |x|^2 + 1/4 |x|^4 - eta (x1^3 - 3 x1 x2^2)
// ---------------------------------------------------------------------------

struct ThreeFoldParams {
  double eta = 0.7;

  void validate() const;
};

class ThreeFoldObjective final : public Objective {
 public:
  explicit ThreeFoldObjective(ThreeFoldParams params);

  int dim() const override { return 2; }
  std::string name() const override { return "threefold"; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Matrix hessian(const Vector& x) const override;

  const ThreeFoldParams& params() const { return params_; }

  // Radii of the critical points on the x1 axis: the roots of r^2 - 3 eta r + 1 = 0.
  // Only real when eta > 2/3.
  double saddle_radius() const;
  double outer_minimum_radius() const;

 private:
  ThreeFoldParams params_;
};

ObjectivePtr threefold_problem(const ThreeFoldParams& params = {});

// ---------------------------------------------------------------------------
// Rank-one symmetric matrix factorization
//   J(x) = 1/4 || x x^T - M* ||_F^2,  M* = V diag(spectrum) V^T
// ---------------------------------------------------------------------------

struct MatFacParams {
  Vector spectrum;  // strictly decreasing, nonnegative
  Matrix basis;     // orthogonal; column i is the eigenvector for spectrum(i)

  int dim() const { return static_cast<int>(spectrum.size()); }
  double gap() const { return spectrum(0) - spectrum(1); }
  void validate() const;
};

// lambda_1 = 1, lambda_2 = 1 - delta and a linear tail
// lambda_i = 0.5 (n - i) / (n - 2) for i = 3..n (1-based).
Vector default_spectrum(int n, double delta);

// Orthogonal matrix from the QR factorization of a seeded Gaussian matrix.
Matrix random_orthogonal(int n, std::uint64_t seed);

// Identity eigenbasis with the default spectrum.
MatFacParams default_matfac_params(int n, double delta);

class MatFacObjective final : public Objective {
 public:
  explicit MatFacObjective(MatFacParams params);

  int dim() const override { return params_.dim(); }
  std::string name() const override { return "matfac"; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Matrix hessian(const Vector& x) const override;
  std::optional<Vector> curvature_sensitivity(const Vector& x, const Vector& u) const override;
  // In the target's eigenbasis the Hessian is diag(|x|^2 - lambda_i) + 2 y y^T
  // with y = V^T x, so its two lowest eigenvalues are roots of the secular
  // equation 1 + 2 sum y_i^2 / (d_i - mu) = 0.
  std::optional<EigenPair> smallest_eigenpair(const Vector& x) const override;

  const MatFacParams& params() const { return params_; }
  const Matrix& target() const { return target_; }
  // Column i of the eigenbasis (0-based).
  Vector eigenvector(int i) const { return params_.basis.col(i); }
  double eigenvalue(int i) const { return params_.spectrum(i); }

 private:
  Vector apply_target(const Vector& x) const;
  Vector to_eigenbasis(const Vector& x) const;
  Vector from_eigenbasis(const Vector& y) const;

  MatFacParams params_;
  Matrix target_;
  double target_norm_sq_;
  bool identity_basis_;
};

ObjectivePtr matfac_problem(const MatFacParams& params);

// ---------------------------------------------------------------------------
// Central-difference oracles
// ---------------------------------------------------------------------------

// Default steps: 1e-5 (1 + |x|) for gradients, 1e-4 (1 + |x|) for Hessians.
double default_gradient_step(const Vector& x);
double default_hessian_step(const Vector& x);

Vector fd_grad(const Objective& problem, const Vector& x, double h);
// Differences of the analytic gradient, symmetrized as (A + A^T) / 2.
Matrix fd_hess(const Objective& problem, const Vector& x, double h);

}  // namespace crgd
