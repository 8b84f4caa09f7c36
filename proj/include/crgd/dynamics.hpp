#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "crgd/curvature.hpp"
#include "crgd/laws.hpp"
#include "crgd/objective.hpp"

namespace crgd {

struct CrgdConfig {
  double beta = 1.0;                 // curvature penalty weight
  double eps_r = 1e-12;              // gain regularizer in the denominator
  ConvergenceLaw law = Exponential{};
  double phi_star_estimate = 0.0;    // lower bound used in place of the optimal Phi
  double tol_grad = 1e-3;            // SOSP: |grad J| < tol_grad
  double tol_eig = 1e-4;             // SOSP: lambda_min > -tol_eig

  void validate() const;
};

struct SolverConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 1e-6;
  double h_min = 1e-15;
  double h_max = 1.0;
  double t_max = 10.0;
  long max_steps = 20'000'000;
  // When false only the initial and the latest sample are retained.
  bool keep_samples = true;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Right-hand sides

struct CrgdVelocity {
  Vector u;
  double sigma = 0.0;
  AugmentedEval eval;
};

// u = -sigma(V, t) grad Phi / (|grad Phi|^2 + eps_r), V = max(0, Phi - Phi~*).
CrgdVelocity crgd_rhs(const Objective& problem, const Vector& x, double t, const CrgdConfig& cfg);

Vector gd_rhs(const Objective& problem, const Vector& x);

bool is_sosp(const Objective& problem, const Vector& x, const CrgdConfig& cfg);

// Diagnostics a vector field reports about the point it was evaluated at.
// Quantities a field does not compute stay NaN.
struct Probe {
  double cost = std::numeric_limits<double>::quiet_NaN();
  double phi = std::numeric_limits<double>::quiet_NaN();
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  double lambda_min = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
};

class VectorField {
 public:
  virtual ~VectorField() = default;
  virtual int dim() const = 0;
  // `probe` may be null; when set, the field fills whatever diagnostics it has.
  virtual Vector velocity(double t, const Vector& x, Probe* probe) const = 0;
  // Latest time the field may be evaluated at.
  virtual double time_limit() const { return std::numeric_limits<double>::infinity(); }
};

class CrgdField final : public VectorField {
 public:
  CrgdField(ObjectivePtr problem, CrgdConfig cfg);
  int dim() const override { return problem_->dim(); }
  Vector velocity(double t, const Vector& x, Probe* probe) const override;
  double time_limit() const override { return crgd::time_limit(cfg_.law); }

 private:
  ObjectivePtr problem_;
  CrgdConfig cfg_;
};

// Plain gradient flow. With `track_curvature` each probed point also carries
// lambda_min and Phi for the given beta (one eigendecomposition per step).
class GradientField final : public VectorField {
 public:
  explicit GradientField(ObjectivePtr problem, bool track_curvature = false, double beta = 1.0);
  int dim() const override { return problem_->dim(); }
  Vector velocity(double t, const Vector& x, Probe* probe) const override;

 private:
  ObjectivePtr problem_;
  bool track_curvature_;
  double beta_;
};

// Adapts an arbitrary callable; used for scalar test problems.
class FunctionField final : public VectorField {
 public:
  using Fn = std::function<Vector(double, const Vector&)>;
  FunctionField(int dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}
  int dim() const override { return dim_; }
  Vector velocity(double t, const Vector& x, Probe* probe) const override;

 private:
  int dim_;
  Fn fn_;
};

// ---------------------------------------------------------------------------
// Trajectories

struct Sample {
  double t = 0.0;
  Vector x;
  double cost = 0.0;        // J
  double phi = 0.0;         // Phi
  double grad_norm = 0.0;   // |grad J|
  double lambda_min = std::numeric_limits<double>::quiet_NaN();
  double u_norm = 0.0;
};

enum class Termination {
  ConvergedSOSP,
  SaddleStall,
  HorizonReached,
  PrescribedHorizon,
  StepFloor,
  StepLimit,
};

struct TerminationStatus {
  Termination kind = Termination::HorizonReached;
  double t = 0.0;
};

std::string to_string(Termination kind);

struct Trajectory {
  std::vector<Sample> samples;
  TerminationStatus status;
  int degenerate_crossings = 0;
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
  std::string message;

  const Sample& initial() const { return samples.front(); }
  const Sample& final() const { return samples.back(); }
  bool converged() const { return status.kind == Termination::ConvergedSOSP; }
};

// Called on every recorded sample (including the initial one); returning a
// status ends the integration. The sample may be completed in place (e.g.
// lambda_min filled in on demand).
using StopPredicate = std::function<std::optional<TerminationStatus>(Sample&)>;

struct StopRule {
  bool stop_on_sosp = true;
  // Consecutive accepted steps with the gradient test passing and the
  // curvature test failing before declaring SaddleStall; 0 disables.
  int stall_window = 0;
};

inline constexpr int kDefaultStallWindow = 50;

// Stateful monitor applying the SOSP and stall tests of `cfg` to each sample.
StopPredicate sosp_monitor(ObjectivePtr problem, const CrgdConfig& cfg, StopRule rule);

// Adaptive Dormand-Prince 5(4) with PI step-size control. A sample is logged
// at every accepted step unless keep_samples is off. Ends at
// min(t_max, field.time_limit()), on a stop predicate verdict, at the step
// floor (10 consecutive demands below h_min, which also covers non-finite
// stages), or at max_steps.
Trajectory integrate(const VectorField& field, const Vector& x0, const SolverConfig& solver,
                     const StopPredicate& stop = {}, double t0 = 0.0);

// One fixed Dormand-Prince step of size h; returns the fifth-order solution.
Vector dopri5_step(const VectorField& field, double t, const Vector& x, double h);

}  // namespace crgd
