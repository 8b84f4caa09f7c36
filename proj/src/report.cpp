#include "crgd/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace crgd {

const char* version() { return CRGD_VERSION; }

namespace {

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << std::setprecision(17);
  }

  template <class T>
  CsvWriter& cell(const T& value) {
    sep();
    out_ << value;
    return *this;
  }

  CsvWriter& num(double v) {
    sep();
    // NaN and infinities are written in a spelling every CSV reader accepts.
    if (std::isnan(v)) {
      out_ << "nan";
    } else if (std::isinf(v)) {
      out_ << (v > 0 ? "inf" : "-inf");
    } else {
      out_ << v;
    }
    return *this;
  }

  CsvWriter& empty() {
    sep();
    return *this;
  }

  void end() {
    out_ << '\n';
    first_ = true;
  }

  void header(std::initializer_list<const char*> names) {
    for (const char* n : names) cell(n);
    end();
  }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }

  std::ofstream out_;
  bool first_ = true;
};

}  // namespace

void write_trajectories_csv(const std::filesystem::path& path,
                            const std::vector<LabeledTrajectory>& runs) {
  const bool planar = !runs.empty() && !runs.front().second->samples.empty() &&
                      runs.front().second->samples.front().x.size() == 2;
  CsvWriter w(path);
  w.cell("method").cell("t");
  if (planar) {
    w.cell("x1").cell("x2");
  } else {
    w.cell("x_norm");
  }
  w.header({"J", "phi", "grad_norm", "lambda_min", "u_norm"});
  for (const auto& [label, traj] : runs) {
    for (const Sample& s : traj->samples) {
      w.cell(label).num(s.t);
      if (planar) {
        w.num(s.x(0)).num(s.x(1));
      } else {
        w.num(s.x.norm());
      }
      w.num(s.cost).num(s.phi).num(s.grad_norm).num(s.lambda_min).num(s.u_norm);
      w.end();
    }
  }
}

void write_rate_profiles_csv(const std::filesystem::path& path, const RateProfiles& profiles) {
  CsvWriter w(path);
  w.header({"law", "t", "phi", "reference"});
  for (const RateProfile& p : profiles.crgd) {
    const std::string name = law_name(p.law);
    const double t0 = p.trajectory.initial().t;
    for (const Sample& s : p.trajectory.samples) {
      w.cell(name).num(s.t).num(s.phi).num(reference_solution(p.law, p.v0, s.t - t0));
      w.end();
    }
  }
  for (const Sample& s : profiles.gd.samples) {
    w.cell("gd").num(s.t).num(s.phi).empty();
    w.end();
  }
}

void write_gap_sweep_csv(const std::filesystem::path& path, const GapSweepResult& result) {
  CsvWriter w(path);
  w.header({"delta", "t_conv_gd", "t_conv_crgd", "status_gd", "status_crgd", "gd_horizon",
            "steps_gd", "steps_crgd"});
  for (const GapSweepRow& r : result.rows) {
    w.num(r.delta).num(r.t_conv_gd).num(r.t_conv_crgd);
    w.cell(to_string(r.status_gd)).cell(to_string(r.status_crgd));
    w.num(r.gd_horizon).cell(r.steps_gd).cell(r.steps_crgd);
    w.end();
  }
}

void write_gap_fit_csv(const std::filesystem::path& path, const GapSweepResult& result) {
  CsvWriter w(path);
  w.header({"method", "slope", "intercept", "residual", "points"});
  w.cell("gd").num(result.fit_gd.slope).num(result.fit_gd.intercept);
  w.num(result.fit_gd.residual).cell(result.fit_gd.points);
  w.end();
  w.cell("crgd").num(result.fit_crgd.slope).num(result.fit_crgd.intercept);
  w.num(result.fit_crgd.residual).cell(result.fit_crgd.points);
  w.end();
}

void write_monte_carlo_csv(const std::filesystem::path& path, const MonteCarloReport& report) {
  CsvWriter w(path);
  w.header({"delta", "horizon", "method", "trials", "sosp_count", "rate_percent",
            "std_error_percent", "solver_failures", "seed"});
  for (const MonteCarloCell& c : report.cells) {
    w.num(c.delta).num(c.horizon).cell(c.method).cell(c.trials).cell(c.sosp_count);
    w.num(c.rate_percent()).num(c.std_error_percent()).cell(c.solver_failures).cell(report.seed);
    w.end();
  }
}

void write_monte_carlo_trials_csv(const std::filesystem::path& path,
                                  const MonteCarloReport& report) {
  CsvWriter w(path);
  w.header({"delta", "trial", "method", "horizon", "sosp", "status", "solver_failure"});
  for (const MonteCarloTrial& t : report.trials) {
    w.num(t.delta).cell(t.trial).cell(t.method).num(t.horizon).cell(t.sosp ? 1 : 0);
    w.cell(to_string(t.status)).cell(t.solver_failure ? 1 : 0);
    w.end();
  }
}

void write_grid_scan_csv(const std::filesystem::path& path, const GridScanResult& result) {
  CsvWriter w(path);
  w.header({"x1", "x2", "grad_phi_norm", "lambda_min"});
  for (const GridCell& c : result.cells) {
    w.num(c.x1).num(c.x2).num(c.grad_phi_norm).num(c.lambda_min);
    w.end();
  }
}

void write_beta_sweep_csv(const std::filesystem::path& path, const BetaSweepResult& result) {
  CsvWriter w(path);
  w.header({"beta", "status", "t_end", "sosp", "final_cost", "steps", "rejected", "message"});
  for (const BetaSweepRow& r : result.rows) {
    w.num(r.beta).cell(to_string(r.status)).num(r.t_end).cell(r.sosp ? 1 : 0);
    w.num(r.final_cost).cell(r.steps).cell(r.rejected);
    // Keep the free-text column free of separators.
    std::string msg = r.message;
    for (char& ch : msg) {
      if (ch == ',' || ch == '"') ch = ';';
    }
    w.cell(msg);
    w.end();
  }
}

void write_checks_csv(const std::filesystem::path& path, const std::vector<CheckResult>& results) {
  CsvWriter w(path);
  w.header({"name", "passed", "worst", "tolerance", "evaluated", "skipped"});
  for (const CheckResult& r : results) {
    w.cell(r.name).cell(r.passed ? 1 : 0).num(r.worst).num(r.tolerance).cell(r.evaluated);
    w.cell(r.skipped);
    w.end();
  }
}

void write_manifest(const std::filesystem::path& path, const nlohmann::json& config,
                    const std::vector<std::string>& artifacts) {
  nlohmann::json m;
  m["version"] = version();
  m["config"] = config;
  m["artifacts"] = artifacts;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << m.dump(2) << '\n';
}

}  // namespace crgd
