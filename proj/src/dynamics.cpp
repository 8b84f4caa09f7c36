#include "crgd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace crgd {

void CrgdConfig::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("crgd.beta must be > 0");
  if (!(eps_r > 0.0)) throw std::invalid_argument("crgd.eps_r must be > 0");
  if (!(tol_grad > 0.0)) throw std::invalid_argument("crgd.tol_grad must be > 0");
  if (!(tol_eig > 0.0)) throw std::invalid_argument("crgd.tol_eig must be > 0");
  if (!std::isfinite(phi_star_estimate)) {
    throw std::invalid_argument("crgd.phi_star_estimate must be finite");
  }
  crgd::validate(law);
}

void SolverConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("solver: rtol, atol must be > 0");
  if (!(h_min > 0.0) || !(h_min <= h_init) || !(h_init <= h_max)) {
    throw std::invalid_argument("solver: need 0 < h_min <= h_init <= h_max");
  }
  if (!(t_max > 0.0)) throw std::invalid_argument("solver: t_max must be > 0");
  if (max_steps < 1) throw std::invalid_argument("solver: max_steps must be >= 1");
}

// ---------------------------------------------------------------------------

CrgdVelocity crgd_rhs(const Objective& problem, const Vector& x, double t, const CrgdConfig& cfg) {
  CrgdVelocity out;
  out.eval = augmented_eval(problem, x, cfg.beta);
  const double V = std::max(0.0, out.eval.phi - cfg.phi_star_estimate);
  out.sigma = sigma(cfg.law, V, t);
  const double gain = out.sigma / (out.eval.grad_phi.squaredNorm() + cfg.eps_r);
  out.u = -gain * out.eval.grad_phi;
  return out;
}

Vector gd_rhs(const Objective& problem, const Vector& x) { return -problem.gradient(x); }

bool is_sosp(const Objective& problem, const Vector& x, const CrgdConfig& cfg) {
  if (!(problem.gradient(x).norm() < cfg.tol_grad)) return false;
  return hessian_eigmin(problem, x).lambda_min > -cfg.tol_eig;
}

CrgdField::CrgdField(ObjectivePtr problem, CrgdConfig cfg)
    : problem_(std::move(problem)), cfg_(std::move(cfg)) {
  cfg_.validate();
}

Vector CrgdField::velocity(double t, const Vector& x, Probe* probe) const {
  CrgdVelocity v = crgd_rhs(*problem_, x, t, cfg_);
  if (probe != nullptr) {
    probe->cost = v.eval.cost;
    probe->phi = v.eval.phi;
    probe->grad_norm = v.eval.g.norm();
    probe->lambda_min = v.eval.eigen.lambda_min;
    probe->degenerate = v.eval.degenerate();
  }
  return std::move(v.u);
}

GradientField::GradientField(ObjectivePtr problem, bool track_curvature, double beta)
    : problem_(std::move(problem)), track_curvature_(track_curvature), beta_(beta) {
  if (!(beta_ > 0.0)) throw std::invalid_argument("GradientField: beta must be > 0");
}

Vector GradientField::velocity(double /*t*/, const Vector& x, Probe* probe) const {
  Vector g = problem_->gradient(x);
  if (probe != nullptr) {
    probe->cost = problem_->value(x);
    probe->grad_norm = g.norm();
    if (track_curvature_) {
      const EigenPair e = hessian_eigmin(*problem_, x);
      const double neg = std::max(0.0, -e.lambda_min);
      probe->lambda_min = e.lambda_min;
      probe->phi = probe->cost + 0.5 * beta_ * beta_ * neg * neg;
      probe->degenerate = e.lambda_min < 0.0 && e.gap_to_next < kDegenerateGap;
    }
  }
  return -g;
}

Vector FunctionField::velocity(double t, const Vector& x, Probe* probe) const {
  Vector v = fn_(t, x);
  if (probe != nullptr) {
    probe->cost = 0.5 * x.squaredNorm();
    probe->phi = probe->cost;
  }
  return v;
}

// ---------------------------------------------------------------------------

std::string to_string(Termination kind) {
  switch (kind) {
    case Termination::ConvergedSOSP: return "ConvergedSOSP";
    case Termination::SaddleStall: return "SaddleStall";
    case Termination::HorizonReached: return "HorizonReached";
    case Termination::PrescribedHorizon: return "PrescribedHorizon";
    case Termination::StepFloor: return "StepFloor";
    case Termination::StepLimit: return "StepLimit";
  }
  return "Unknown";
}

StopPredicate sosp_monitor(ObjectivePtr problem, const CrgdConfig& cfg, StopRule rule) {
  int stalled = 0;
  return [problem = std::move(problem), tol_grad = cfg.tol_grad, tol_eig = cfg.tol_eig, rule,
          stalled](Sample& s) mutable -> std::optional<TerminationStatus> {
    if (!(s.grad_norm < tol_grad)) {
      stalled = 0;
      return std::nullopt;
    }
    if (std::isnan(s.lambda_min)) s.lambda_min = hessian_eigmin(*problem, s.x).lambda_min;
    if (s.lambda_min > -tol_eig) {
      stalled = 0;
      if (rule.stop_on_sosp) return TerminationStatus{Termination::ConvergedSOSP, s.t};
      return std::nullopt;
    }
    if (rule.stall_window > 0 && ++stalled >= rule.stall_window) {
      return TerminationStatus{Termination::SaddleStall, s.t};
    }
    return std::nullopt;
  };
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// Fifth- minus fourth-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

struct StageResult {
  Vector x_new;
  Vector k_new;  // velocity at (t + h, x_new)
  Vector error;
};

StageResult dopri_stages(const VectorField& f, double t, const Vector& x, const Vector& k1, double h,
                         Probe* probe) {
  const Vector k2 = f.velocity(t + c2 * h, x + h * a21 * k1, nullptr);
  const Vector k3 = f.velocity(t + c3 * h, x + h * (a31 * k1 + a32 * k2), nullptr);
  const Vector k4 = f.velocity(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3), nullptr);
  const Vector k5 =
      f.velocity(t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), nullptr);
  const Vector k6 = f.velocity(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5),
                               nullptr);
  StageResult r;
  r.x_new = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  r.k_new = f.velocity(t + h, r.x_new, probe);
  r.error = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * r.k_new);
  return r;
}

double error_norm(const Vector& err, const Vector& x, const Vector& x_new, const SolverConfig& s) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double scale = s.atol + s.rtol * std::max(std::abs(x(i)), std::abs(x_new(i)));
    const double r = err(i) / scale;
    acc += r * r;
  }
  const double n = std::sqrt(acc / static_cast<double>(err.size()));
  return std::isfinite(n) && x_new.allFinite() ? n : std::numeric_limits<double>::infinity();
}

Sample make_sample(double t, const Vector& x, const Vector& k, const Probe& p) {
  Sample s;
  s.t = t;
  s.x = x;
  s.cost = p.cost;
  s.phi = p.phi;
  s.grad_norm = p.grad_norm;
  s.lambda_min = p.lambda_min;
  s.u_norm = k.norm();
  return s;
}

}  // namespace

Vector dopri5_step(const VectorField& field, double t, const Vector& x, double h) {
  const Vector k1 = field.velocity(t, x, nullptr);
  return dopri_stages(field, t, x, k1, h, nullptr).x_new;
}

Trajectory integrate(const VectorField& field, const Vector& x0, const SolverConfig& solver,
                     const StopPredicate& stop, double t0) {
  solver.validate();
  if (x0.size() != field.dim()) throw std::invalid_argument("integrate: x0 has wrong dimension");
  if (!x0.allFinite()) throw std::invalid_argument("integrate: x0 must be finite");

  const double limit = field.time_limit();
  const double t_end = std::min(solver.t_max, limit);
  const Termination horizon_kind =
      limit < solver.t_max ? Termination::PrescribedHorizon : Termination::HorizonReached;
  if (!(t0 < t_end)) throw std::invalid_argument("integrate: t0 must precede the horizon");

  Trajectory traj;
  double t = t0;
  Vector x = x0;
  Probe probe;
  Vector k = field.velocity(t, x, &probe);
  ++traj.evaluations;

  auto record = [&](const Probe& p) -> bool {
    if (!solver.keep_samples && traj.samples.size() == 2) {
      traj.samples.back() = make_sample(t, x, k, p);
    } else {
      traj.samples.push_back(make_sample(t, x, k, p));
    }
    if (p.degenerate) ++traj.degenerate_crossings;
    if (stop) {
      if (auto verdict = stop(traj.samples.back())) {
        traj.status = *verdict;
        return true;
      }
    }
    return false;
  };
  if (record(probe)) return traj;
  if (!k.allFinite()) {
    traj.status = {Termination::StepFloor, t};
    traj.message = "non-finite velocity at the initial state";
    return traj;
  }

  // PI controller (Hairer & Wanner, DOPRI5 defaults).
  constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0;
  constexpr double alpha = 0.2 - 0.04 * 0.75, beta = 0.04;
  double h = std::min({solver.h_init, solver.h_max, t_end - t});
  double err_prev = 1e-4;
  bool last_rejected = false;
  int floor_hits = 0;

  while (true) {
    const double remaining = t_end - t;
    if (remaining <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      traj.status = {horizon_kind, t};
      return traj;
    }
    if (traj.accepted >= solver.max_steps) {
      traj.status = {Termination::StepLimit, t};
      traj.message = "max_steps reached";
      return traj;
    }
    const bool final_step = h >= remaining;
    const double h_step = final_step ? remaining : h;
    if (!(t + h_step > t)) {
      traj.status = {Termination::StepFloor, t};
      traj.message = "step size below time resolution";
      return traj;
    }

    Probe next_probe;
    StageResult r = dopri_stages(field, t, x, k, h_step, &next_probe);
    traj.evaluations += 6;
    const double err = error_norm(r.error, x, r.x_new, solver);

    if (err <= 1.0 && r.k_new.allFinite()) {
      ++traj.accepted;
      floor_hits = 0;
      t = final_step ? t_end : t + h_step;
      x = std::move(r.x_new);
      k = std::move(r.k_new);
      if (record(next_probe)) return traj;

      double fac = err == 0.0 ? fac_max
                              : safety * std::pow(err, -alpha) * std::pow(err_prev, beta);
      fac = std::clamp(fac, fac_min, fac_max);
      if (last_rejected) fac = std::min(fac, 1.0);
      err_prev = std::max(err, 1e-4);
      last_rejected = false;
      h = std::clamp(h_step * fac, solver.h_min, solver.h_max);
    } else {
      ++traj.rejected;
      last_rejected = true;
      const double fac =
          std::isfinite(err) ? std::max(fac_min, safety * std::pow(err, -0.2)) : fac_min;
      h = h_step * fac;
      if (h < solver.h_min) {
        h = solver.h_min;
        if (++floor_hits >= 10) {
          traj.status = {Termination::StepFloor, t};
          std::ostringstream msg;
          msg << "step size demand fell below h_min = " << solver.h_min << " at t = " << t;
          if (!std::isfinite(err)) msg << " (non-finite stage values)";
          traj.message = msg.str();
          return traj;
        }
      }
    }
  }
}

}  // namespace crgd
