#pragma once

#include "crgd/objective.hpp"

namespace crgd {

// Asymmetry above 1e-10 (1 + max|H|) is rejected with std::invalid_argument.
EigenPair eigmin(const Matrix& h);

// Smallest eigenpair of the Hessian at x: the objective's structured solver
// when it has one, else eigmin.
EigenPair hessian_eigmin(const Objective& problem, const Vector& x);

// Eigenvalue gaps below this count as a crossing of the smallest eigenvalue.
inline constexpr double kDegenerateGap = 1e-10;

// Curvature sensitivity w_j = u^T (dH/dx_j) u with dH/dx_j from central
// differences of the Hessian, step 1e-4 (1 + |x|).
Vector wmin_generic(const Objective& problem, const Vector& x, const Vector& u_min);

// Closed form for the matrix-factorization landscape: w = 2x + 4 (x.u) u.
Vector smf_wmin(const Vector& x, const Vector& u_min);

// Analytic sensitivity when the objective provides one, else wmin_generic.
Vector curvature_sensitivity(const Objective& problem, const Vector& x, const Vector& u_min);

// Augmented cost Phi = J + (beta^2 / 2) max(0, -lambda_min)^2 and its gradient.
struct AugmentedEval {
  double cost = 0.0;     // J
  double phi = 0.0;      // Phi
  double penalty = 0.0;  // P >= 0
  Vector g;              // grad J
  Vector grad_phi;       // grad Phi
  EigenPair eigen;
  Vector w_min;          // empty when lambda_min >= 0 (the correction term is inactive)

  // lambda_min < 0 with a near-zero gap: the eigenvector, and hence grad Phi,
  // is not unique here.
  bool degenerate() const { return eigen.lambda_min < 0.0 && eigen.gap_to_next < kDegenerateGap; }
};

AugmentedEval augmented_eval(const Objective& problem, const Vector& x, double beta);

// u_min^T (Hessian of Phi) u_min, the Hessian of Phi taken by central
// differences of grad Phi along u_min. Requires lambda_min < 0 and simple
// (gap > 1e-8); throws std::domain_error otherwise.
double spurious_quadform(const Objective& problem, const Vector& x, double beta);

}  // namespace crgd
