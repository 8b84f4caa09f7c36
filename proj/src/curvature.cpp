#include "crgd/curvature.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <stdexcept>
#include <string>

namespace crgd {

namespace {
constexpr Eigen::Index kSmallMatrix = 8;
}  // namespace

EigenPair eigmin(const Matrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw std::invalid_argument("eigmin: expected a nonempty square matrix");
  }
  const double scale = 1.0 + h.cwiseAbs().maxCoeff();
  const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-10 * scale)) {
    throw std::invalid_argument("eigmin: matrix is not symmetric (max asymmetry " +
                                std::to_string(asym) + ")");
  }

  EigenPair out;
  if (h.rows() <= kSmallMatrix) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("eigmin: symmetric eigensolver did not converge");
    }
    out.lambda_min = solver.eigenvalues()(0);
    out.u_min = solver.eigenvectors().col(0);
    out.gap_to_next = h.rows() > 1 ? solver.eigenvalues()(1) - solver.eigenvalues()(0) : 0.0;
  } else {
    // Eigenvalues only, then the vector by shifted inverse iteration. Much
    // cheaper than accumulating the full eigenbasis.
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("eigmin: symmetric eigensolver did not converge");
    }
    out.lambda_min = solver.eigenvalues()(0);
    out.gap_to_next = solver.eigenvalues()(1) - solver.eigenvalues()(0);
    const double shift =
        out.lambda_min - 4.0 * std::numeric_limits<double>::epsilon() * (scale * h.rows());
    Matrix shifted = h;
    shifted.diagonal().array() -= shift;
    const Eigen::PartialPivLU<Matrix> lu(shifted);
    Vector v(h.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = 1.0 + 0.5 * std::sin(1.7 * i + 0.3);
    for (int it = 0; it < 3; ++it) {
      v = lu.solve(v);
      if (!v.allFinite() || v.norm() == 0.0) {
        throw std::runtime_error("eigmin: inverse iteration failed");
      }
      v.normalize();
    }
    out.u_min = std::move(v);
  }
  out.u_min.normalize();

  Eigen::Index k = 0;
  out.u_min.cwiseAbs().maxCoeff(&k);
  if (out.u_min(k) < 0.0) out.u_min = -out.u_min;
  return out;
}

EigenPair hessian_eigmin(const Objective& problem, const Vector& x) {
  if (auto e = problem.smallest_eigenpair(x)) return *std::move(e);
  return eigmin(problem.hessian(x));
}

Vector wmin_generic(const Objective& problem, const Vector& x, const Vector& u_min) {
  const int n = static_cast<int>(x.size());
  const double h = default_hessian_step(x);
  Vector w(n);
  Vector xp = x, xm = x;
  for (int j = 0; j < n; ++j) {
    xp(j) = x(j) + h;
    xm(j) = x(j) - h;
    const Matrix dh = (problem.hessian(xp) - problem.hessian(xm)) / (2.0 * h);
    w(j) = u_min.dot(dh * u_min);
    xp(j) = xm(j) = x(j);
  }
  return w;
}

Vector smf_wmin(const Vector& x, const Vector& u_min) { return 2.0 * x + 4.0 * x.dot(u_min) * u_min; }

Vector curvature_sensitivity(const Objective& problem, const Vector& x, const Vector& u_min) {
  if (auto w = problem.curvature_sensitivity(x, u_min)) return *std::move(w);
  return wmin_generic(problem, x, u_min);
}

AugmentedEval augmented_eval(const Objective& problem, const Vector& x, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("augmented_eval: beta must be positive");
  AugmentedEval out;
  out.cost = problem.value(x);
  out.g = problem.gradient(x);
  out.eigen = hessian_eigmin(problem, x);

  const double neg = std::max(0.0, -out.eigen.lambda_min);
  const double b2 = beta * beta;
  out.penalty = 0.5 * b2 * neg * neg;
  out.phi = out.cost + out.penalty;
  if (neg > 0.0) {
    out.w_min = curvature_sensitivity(problem, x, out.eigen.u_min);
    out.grad_phi = out.g - b2 * neg * out.w_min;
  } else {
    out.grad_phi = out.g;
  }
  return out;
}

double spurious_quadform(const Objective& problem, const Vector& x, double beta) {
  const EigenPair e = hessian_eigmin(problem, x);
  if (!(e.lambda_min < 0.0)) {
    throw std::domain_error("spurious_quadform: requires lambda_min < 0");
  }
  if (!(e.gap_to_next > 1e-8)) {
    throw std::domain_error("spurious_quadform: lambda_min is degenerate");
  }
  const double h = 1e-5 * (1.0 + x.norm());
  const Vector gp = augmented_eval(problem, x + h * e.u_min, beta).grad_phi;
  const Vector gm = augmented_eval(problem, x - h * e.u_min, beta).grad_phi;
  return e.u_min.dot(gp - gm) / (2.0 * h);
}

}  // namespace crgd
