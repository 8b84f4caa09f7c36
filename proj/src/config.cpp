#include "crgd/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace crgd {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

// Walks one JSON object, rejecting keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(child(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(child(key), "expected an integer");
      if (std::is_unsigned_v<Int> && v->is_number_integer() && !v->is_number_unsigned()) {
        fail(child(key), "expected a nonnegative integer");
      }
      out = v->get<Int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(child(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(child(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void numbers(const std::string& key, std::optional<std::vector<double>>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(child(key), "expected an array of numbers");
      std::vector<double> xs;
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number()) fail(child(key) + "[" + std::to_string(i) + "]", "expected a number");
        xs.push_back((*v)[i].get<double>());
      }
      out = std::move(xs);
    }
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) fail(child(it.key()), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class Fn>
void section(ObjectReader& parent, const std::string& key, Fn&& fn) {
  if (const json* v = parent.find(key)) {
    ObjectReader r(*v, parent.child(key));
    fn(r);
    r.finish();
  }
}

void check(bool ok, const std::string& path, const std::string& what) {
  if (!ok) fail(path, what);
}

}  // namespace

ConvergenceLaw LawConfig::build() const {
  if (type == "exponential") return Exponential{c};
  if (type == "finite") return FiniteTime{c, alpha};
  if (type == "fixed") return FixedTime{c1, c2, alpha, p};
  if (type == "prescribed") return PrescribedTime{T, mu};
  fail("law.type", "unknown law '" + type + "' (expected exponential, finite, fixed or prescribed)");
}

void RunConfig::finalize() {
  check(std::find(kExperiments.begin(), kExperiments.end(), experiment) != kExperiments.end(),
        "experiment", "unknown experiment '" + experiment + "'");
  check(jobs >= 1, "jobs", "must be >= 1");

  check(problem.eta > 2.0 / 3.0, "problem.eta", "must exceed 2/3 for the saddles to exist");
  check(problem.n >= 3, "problem.n", "must be >= 3");
  check(problem.delta > 0.0 && problem.delta < 0.5, "problem.delta", "must lie in (0, 0.5)");
  check(problem.basis == "identity" || problem.basis == "random", "problem.basis",
        "expected identity or random");

  crgd.law = law.build();
  try {
    validate(crgd.law);
  } catch (const std::invalid_argument& e) {
    fail("law", e.what());
  }
  check(crgd.beta > 0.0, "crgd.beta", "must be > 0");
  check(crgd.eps_r > 0.0, "crgd.eps_r", "must be > 0");
  check(crgd.tol_grad > 0.0, "crgd.tol_grad", "must be > 0");
  check(crgd.tol_eig > 0.0, "crgd.tol_eig", "must be > 0");

  check(solver.rtol > 0.0, "solver.rtol", "must be > 0");
  check(solver.atol > 0.0, "solver.atol", "must be > 0");
  check(solver.h_min > 0.0, "solver.h_min", "must be > 0");
  check(solver.h_init >= solver.h_min, "solver.h_init", "must be >= solver.h_min");
  check(solver.h_max >= solver.h_init, "solver.h_max", "must be >= solver.h_init");
  check(solver.t_max > 0.0, "solver.t_max", "must be > 0");
  check(solver.max_steps >= 1, "solver.max_steps", "must be >= 1");

  if (params.deltas) {
    check(!params.deltas->empty(), "params.deltas", "must not be empty");
    for (double d : *params.deltas) check(d > 0.0 && d < 0.5, "params.deltas", "values must lie in (0, 0.5)");
  }
  if (params.trials) check(*params.trials >= 1, "params.trials", "must be >= 1");
  if (params.horizons) {
    check(!params.horizons->empty(), "params.horizons", "must not be empty");
    for (double h : *params.horizons) check(h > 0.0, "params.horizons", "values must be positive");
  }
  if (params.betas) {
    check(!params.betas->empty(), "params.betas", "must not be empty");
    for (double b : *params.betas) check(b > 0.0, "params.betas", "values must be positive");
  }
  if (params.resolution) check(*params.resolution >= 2, "params.resolution", "must be >= 2");
  if (params.bounds) check((*params.bounds)[0] < (*params.bounds)[1], "params.bounds", "need lo < hi");
}

ExperimentConfig RunConfig::experiment_config() const {
  ExperimentConfig out;
  out.crgd = crgd;
  out.solver = solver;
  out.threefold.eta = problem.eta;
  out.jobs = jobs;
  if (problem.basis == "random") out.matfac_basis_seed = seed;
  return out;
}

std::vector<double> RunConfig::deltas() const {
  if (params.deltas) return *params.deltas;
  if (experiment == "monte-carlo") {
    return full_scale ? std::vector<double>{0.1, 0.005, 0.002, 0.001}
                      : std::vector<double>{0.1, 0.001};
  }
  return full_scale ? kPaperGaps : kDeskGaps;
}

int RunConfig::trials() const { return params.trials.value_or(full_scale ? 2000 : 100); }

std::vector<double> RunConfig::horizons() const {
  return params.horizons.value_or(std::vector<double>{10.0, 1000.0});
}

std::vector<double> RunConfig::betas() const { return params.betas.value_or(kDeskBetas); }

int RunConfig::resolution() const { return params.resolution.value_or(500); }

std::array<double, 2> RunConfig::bounds() const {
  return params.bounds.value_or(std::array<double, 2>{-2.0, 2.0});
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
    cfg.finalize();
    return cfg;
  }
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<root>: malformed JSON (") + e.what() + ")");
  }

  ObjectReader r(root, "");
  r.string("experiment", cfg.experiment);
  r.integer("seed", cfg.seed);
  r.string("output_dir", cfg.output_dir);
  r.boolean("full_scale", cfg.full_scale);
  r.integer("jobs", cfg.jobs);
  section(r, "problem", [&](ObjectReader& s) {
    s.number("eta", cfg.problem.eta);
    s.integer("n", cfg.problem.n);
    s.number("delta", cfg.problem.delta);
    s.string("basis", cfg.problem.basis);
  });
  section(r, "crgd", [&](ObjectReader& s) {
    s.number("beta", cfg.crgd.beta);
    s.number("eps_r", cfg.crgd.eps_r);
    s.number("phi_star_estimate", cfg.crgd.phi_star_estimate);
    s.number("tol_grad", cfg.crgd.tol_grad);
    s.number("tol_eig", cfg.crgd.tol_eig);
  });
  section(r, "law", [&](ObjectReader& s) {
    s.string("type", cfg.law.type);
    s.number("c", cfg.law.c);
    s.number("alpha", cfg.law.alpha);
    s.number("c1", cfg.law.c1);
    s.number("c2", cfg.law.c2);
    s.number("p", cfg.law.p);
    s.number("T", cfg.law.T);
    s.number("mu", cfg.law.mu);
  });
  section(r, "solver", [&](ObjectReader& s) {
    s.number("rtol", cfg.solver.rtol);
    s.number("atol", cfg.solver.atol);
    s.number("h_init", cfg.solver.h_init);
    s.number("h_min", cfg.solver.h_min);
    s.number("h_max", cfg.solver.h_max);
    s.number("t_max", cfg.solver.t_max);
    s.integer("max_steps", cfg.solver.max_steps);
  });
  section(r, "params", [&](ObjectReader& s) {
    s.numbers("deltas", cfg.params.deltas);
    if (const json* v = s.find("trials")) {
      if (!v->is_number_integer()) fail(s.child("trials"), "expected an integer");
      cfg.params.trials = v->get<int>();
    }
    s.numbers("horizons", cfg.params.horizons);
    s.numbers("betas", cfg.params.betas);
    if (const json* v = s.find("resolution")) {
      if (!v->is_number_integer()) fail(s.child("resolution"), "expected an integer");
      cfg.params.resolution = v->get<int>();
    }
    std::optional<std::vector<double>> bounds;
    s.numbers("bounds", bounds);
    if (bounds) {
      if (bounds->size() != 2) fail(s.child("bounds"), "expected [lo, hi]");
      cfg.params.bounds = std::array<double, 2>{(*bounds)[0], (*bounds)[1]};
    }
  });
  r.finish();
  cfg.finalize();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

json to_json(const RunConfig& cfg) {
  json j;
  j["experiment"] = cfg.experiment;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["full_scale"] = cfg.full_scale;
  j["jobs"] = cfg.jobs;
  j["problem"] = {{"eta", cfg.problem.eta},
                  {"n", cfg.problem.n},
                  {"delta", cfg.problem.delta},
                  {"basis", cfg.problem.basis}};
  j["crgd"] = {{"beta", cfg.crgd.beta},
               {"eps_r", cfg.crgd.eps_r},
               {"phi_star_estimate", cfg.crgd.phi_star_estimate},
               {"tol_grad", cfg.crgd.tol_grad},
               {"tol_eig", cfg.crgd.tol_eig}};
  j["law"] = {{"type", cfg.law.type}, {"c", cfg.law.c},   {"alpha", cfg.law.alpha},
              {"c1", cfg.law.c1},     {"c2", cfg.law.c2}, {"p", cfg.law.p},
              {"T", cfg.law.T},       {"mu", cfg.law.mu}};
  j["solver"] = {{"rtol", cfg.solver.rtol},   {"atol", cfg.solver.atol},
                 {"h_init", cfg.solver.h_init}, {"h_min", cfg.solver.h_min},
                 {"h_max", cfg.solver.h_max}, {"t_max", cfg.solver.t_max},
                 {"max_steps", cfg.solver.max_steps}};
  // Resolved values, so the manifest reproduces the run without defaults.
  j["params"] = {{"deltas", cfg.deltas()},     {"trials", cfg.trials()},
                 {"horizons", cfg.horizons()}, {"betas", cfg.betas()},
                 {"resolution", cfg.resolution()}, {"bounds", cfg.bounds()}};
  return j;
}

std::filesystem::path default_output_root() {
  if (const char* root = std::getenv("CRGD_OUTPUT_ROOT"); root != nullptr && *root != '\0') {
    return root;
  }
  return "runs";
}

}  // namespace crgd
