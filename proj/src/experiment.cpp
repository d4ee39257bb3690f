#include "kansa/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kansa/parallel.hpp"

namespace kansa {

namespace {

const std::set<std::string> kProblems = {"advection", "lotka_volterra", "maxwell", "burgers"};

const std::map<std::string, std::set<std::string>> kSolvers = {
    {"advection", {"linear", "fdm"}},
    {"lotka_volterra", {"coupled_picard"}},
    {"maxwell", {"coupled"}},
    {"burgers", {"forward_euler", "imex", "backward_euler", "crank_nicolson", "fully_nonlinear"}},
};

const std::map<std::string, std::set<std::string>> kSetupKeys = {
    {"advection", {"beta", "nx", "nt", "nd", "nb", "test_nx", "test_nt", "courant", "random_ic"}},
    {"lotka_volterra",
     {"alpha", "beta", "delta", "gamma", "x0", "y0", "T", "n", "n_test", "max_iter", "tol", "newton",
      "rk4_init"}},
    {"maxwell", {"c", "T", "n", "nd", "nb", "test_nx", "test_nt", "boundary_trace"}},
    {"burgers",
     {"nu", "um", "up", "T", "nx", "nt", "nd", "nb", "test_nx", "test_nt", "exact_bc", "mol_nx",
      "base_steps", "max_cond"}},
};

const std::map<std::string, std::vector<std::string>> kFields = {
    {"advection", {"u"}},
    {"lotka_volterra", {"x", "y"}},
    {"maxwell", {"E_z", "B_y"}},
    {"burgers", {"u"}},
};

double setup_value(const ExperimentConfig& c, const std::string& key, double fallback) {
  auto it = c.setup.find(key);
  return it == c.setup.end() ? fallback : it->second;
}

int setup_int(const ExperimentConfig& c, const std::string& key, int fallback) {
  double v = setup_value(c, key, fallback);
  if (v != std::floor(v) || v < 1) throw ConfigError("setup." + key + " must be a positive integer");
  return static_cast<int>(v);
}

double kernel_eps(const ExperimentConfig& c, const std::string& field, double fallback) {
  auto it = c.kernels.find(field);
  if (it == c.kernels.end()) return fallback;
  if (it->second.family != "gaussian")
    throw ConfigError(c.problem + " supports only the gaussian family");
  return it->second.epsilon;
}

bool is_perfect_power(int v, int dims) {
  try {
    per_axis_factor(v, dims);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

void validate(const ExperimentConfig& c) {
  if (c.id.empty()) throw ConfigError("config needs an id");
  if (!kProblems.count(c.problem)) throw ConfigError("unknown problem: " + c.problem);
  if (!kSolvers.at(c.problem).count(c.solver))
    throw ConfigError("solver " + c.solver + " is not available for " + c.problem);
  if (c.c_scale < 1 || c.ct_scale < 1) throw ConfigError("C_scale values must be >= 1");
  if ((c.problem == "advection" || c.problem == "maxwell") && !is_perfect_power(c.c_scale, 2))
    throw ConfigError("C_scale must be a perfect square for 2D problems");
  if (c.problem == "burgers" && c.c_scale != 1) throw ConfigError("burgers supports only C_scale = 1");
  if (c.problem != "burgers" && c.ct_scale != 1) throw ConfigError("C_t_scale applies only to burgers");
  for (const auto& [k, v] : c.setup) {
    if (!kSetupKeys.at(c.problem).count(k)) throw ConfigError("unknown setup key for " + c.problem + ": " + k);
    if (!std::isfinite(v)) throw ConfigError("setup." + k + " must be finite");
  }
  const auto& fields = kFields.at(c.problem);
  for (const auto& [name, ks] : c.kernels) {
    if (std::find(fields.begin(), fields.end(), name) == fields.end())
      throw ConfigError("unknown field for " + c.problem + ": " + name);
    try {
      RbfKernel(parse_family(ks.family), ks.epsilon);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("kernel ") + name + ": " + e.what());
    }
  }
  if (c.tune) {
    if (!(c.tune->lo > 0 && c.tune->hi > c.tune->lo && c.tune->per_decade >= 1))
      throw ConfigError("tune grid needs 0 < lo < hi and per_decade >= 1");
    if (c.problem != "advection" && !(c.problem == "burgers" && c.solver == "fully_nonlinear"))
      throw ConfigError("tuning supports advection (linear) and burgers (fully_nonlinear)");
  }
  if (c.inverse) {
    const size_t want = c.problem == "lotka_volterra" ? 4 : 1;
    if (c.problem == "maxwell") throw ConfigError("no inverse problem is defined for maxwell");
    if (c.inverse->init.size() != want)
      throw ConfigError("inverse.init needs " + std::to_string(want) + " value(s)");
    try {
      parse_method(c.inverse->method);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (c.inverse->max_fev < 1) throw ConfigError("inverse.max_fev must be positive");
    if (!(c.inverse->line_step >= 0)) throw ConfigError("inverse.line_step must be non-negative");
    if (!(c.inverse->line_tol > 0)) throw ConfigError("inverse.line_tol must be positive");
  }
}

// ------------------------------------------------------------------ setups
AdvectionSetup advection_setup(const ExperimentConfig& c) {
  AdvectionSetup s;
  s.beta = setup_value(c, "beta", s.beta);
  s.nx = setup_int(c, "nx", s.nx);
  s.nt = setup_int(c, "nt", s.nt);
  s.nd = setup_int(c, "nd", s.nd);
  s.nb = setup_int(c, "nb", s.nb);
  s.test_nx = setup_int(c, "test_nx", s.test_nx);
  s.test_nt = setup_int(c, "test_nt", s.test_nt);
  s.courant = setup_value(c, "courant", s.courant);
  if (setup_value(c, "random_ic", 0) != 0) s.u0 = advection_random_ic(c.seed);
  if (auto it = c.kernels.find("u"); it != c.kernels.end())
    s.kernel = RbfKernel(parse_family(it->second.family), it->second.epsilon);
  s.allow_unstable = c.allow_unstable;
  return s;
}

LvSetup lv_setup(const ExperimentConfig& c) {
  LvSetup s;
  s.params.alpha = setup_value(c, "alpha", s.params.alpha);
  s.params.beta = setup_value(c, "beta", s.params.beta);
  s.params.delta = setup_value(c, "delta", s.params.delta);
  s.params.gamma = setup_value(c, "gamma", s.params.gamma);
  s.x0 = setup_value(c, "x0", s.x0);
  s.y0 = setup_value(c, "y0", s.y0);
  s.T = setup_value(c, "T", s.T);
  s.n = setup_int(c, "n", s.n);
  s.n_test = setup_int(c, "n_test", s.n_test);
  s.max_iter = setup_int(c, "max_iter", s.max_iter);
  s.tol = setup_value(c, "tol", s.tol);
  s.newton = setup_value(c, "newton", 1) != 0;
  s.rk4_init = setup_value(c, "rk4_init", 1) != 0;
  s.eps_x = kernel_eps(c, "x", s.eps_x);
  s.eps_y = kernel_eps(c, "y", s.eps_y);
  return s;
}

MaxwellSetup maxwell_setup(const ExperimentConfig& c) {
  MaxwellSetup s;
  s.c = setup_value(c, "c", s.c);
  s.T = setup_value(c, "T", s.T);
  s.n = setup_int(c, "n", s.n);
  s.nd = setup_int(c, "nd", s.nd);
  s.nb = setup_int(c, "nb", s.nb);
  s.test_nx = setup_int(c, "test_nx", s.test_nx);
  s.test_nt = setup_int(c, "test_nt", s.test_nt);
  s.boundary_trace = setup_value(c, "boundary_trace", 1) != 0;
  s.eps_e = kernel_eps(c, "E_z", s.eps_e);
  s.eps_b = kernel_eps(c, "B_y", s.eps_b);
  return s;
}

BurgersSetup burgers_setup(const ExperimentConfig& c) {
  BurgersSetup s;
  s.nu = setup_value(c, "nu", s.nu);
  s.um = setup_value(c, "um", s.um);
  s.up = setup_value(c, "up", s.up);
  s.T = setup_value(c, "T", s.T);
  s.nx = setup_int(c, "nx", s.nx);
  s.nt = setup_int(c, "nt", s.nt);
  s.nd = setup_int(c, "nd", s.nd);
  s.nb = setup_int(c, "nb", s.nb);
  s.test_nx = setup_int(c, "test_nx", s.test_nx);
  s.test_nt = setup_int(c, "test_nt", s.test_nt);
  s.exact_bc = setup_value(c, "exact_bc", 1) != 0;
  s.mol_nx = setup_int(c, "mol_nx", s.mol_nx);
  s.base_steps = setup_int(c, "base_steps", s.base_steps);
  s.max_cond = setup_value(c, "max_cond", s.max_cond);
  s.eps = kernel_eps(c, "u", s.eps);
  return s;
}

SchemeKind scheme_of(const std::string& solver) { return parse_scheme(solver); }

// ------------------------------------------------------------------ records
ResultRecord blank_record(const ExperimentConfig& c) {
  ResultRecord r;
  r.id = c.id;
  r.problem = c.problem;
  r.solver = c.solver;
  r.c_scale = c.c_scale;
  r.ct_scale = c.ct_scale;
  r.config = c;
  return r;
}

void absorb(ResultRecord& r, const BenchOutcome& o) {
  r.scores = o.scores;
  r.train_time_s = o.train_time_s;
  r.infer_time_s = o.infer_time_s;
  r.stable = o.stable;
  r.cond_estimate = o.cond_estimate;
  for (const auto& [k, v] : o.extra) r.extra[k] = v;
}

void fail(ResultRecord& r, const std::exception& e) {
  r.failed = true;
  r.stable = false;
  r.error = e.what();
}

void persist(const ResultRecord& r, const ExperimentConfig& c) {
  if (!c.output.empty()) write_record(r, c.output);
}

BenchOutcome forward_outcome(const ExperimentConfig& c) {
  if (c.problem == "advection") {
    AdvectionSetup s = advection_setup(c);
    return c.solver == "fdm" ? advection_fdm_benchmark(s, c.c_scale) : advection_km_benchmark(s, c.c_scale);
  }
  if (c.problem == "lotka_volterra") return lv_benchmark(lv_setup(c), c.c_scale);
  if (c.problem == "maxwell") return maxwell_benchmark(maxwell_setup(c), c.c_scale);
  BurgersSetup s = burgers_setup(c);
  if (c.solver == "fully_nonlinear") return burgers_fn_benchmark(s);
  return burgers_scheme_benchmark(s, scheme_of(c.solver), c.ct_scale);
}

// Builds every setup once so that config problems surface as ConfigError before solving.
void check_buildable(const ExperimentConfig& c) {
  try {
    if (c.problem == "advection") advection_setup(c);
    else if (c.problem == "lotka_volterra") lv_setup(c);
    else if (c.problem == "maxwell") maxwell_setup(c);
    else burgers_setup(c);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

Json kernel_json(const KernelSpec& k) { return Json{{"family", k.family}, {"epsilon", k.epsilon}}; }

template <class T>
T field_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad value for ") + key + ": " + e.what());
  }
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key in " + where + ": " + it.key());
}

Json resolve_defaults(const Json& j, int depth) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("defaults")) return j;
  if (depth > 8) throw ConfigError("defaults nesting is too deep");
  const Json& d = j.at("defaults");
  Json base;
  if (d.is_string()) base = builtin_defaults(d.get<std::string>());
  else if (d.is_object()) base = resolve_defaults(d, depth + 1);
  else throw ConfigError("defaults must be a problem name or an object");
  Json patch = j;
  patch.erase("defaults");
  // a kernel width given one way replaces an inherited width given the other way
  if (patch.contains("kernels") && patch["kernels"].is_object() && base.contains("kernels"))
    for (auto it = patch["kernels"].begin(); it != patch["kernels"].end(); ++it)
      if (it->is_object() && base["kernels"].contains(it.key()) && base["kernels"][it.key()].is_object()) {
        Json& inherited = base["kernels"][it.key()];
        if (it->contains("sigma")) inherited.erase("epsilon");
        if (it->contains("epsilon")) inherited.erase("sigma");
      }
  base.merge_patch(patch);
  return base;
}

}  // namespace

// ------------------------------------------------------------------ config
Json builtin_defaults(const std::string& problem) {
  if (problem == "advection")
    return {{"problem", "advection"}, {"solver", "linear"},
            {"kernels", {{"u", kernel_json({"gaussian", 3.0})}}}};
  if (problem == "lotka_volterra")
    return {{"problem", "lotka_volterra"}, {"solver", "coupled_picard"},
            {"kernels", {{"x", kernel_json({"gaussian", 0.21})}, {"y", kernel_json({"gaussian", 0.2})}}}};
  if (problem == "maxwell")
    return {{"problem", "maxwell"}, {"solver", "coupled"},
            {"kernels", {{"E_z", kernel_json({"gaussian", 16.0})}, {"B_y", kernel_json({"gaussian", 16.0})}}}};
  if (problem == "burgers")
    return {{"problem", "burgers"}, {"solver", "crank_nicolson"},
            {"kernels", {{"u", kernel_json({"gaussian", 0.9})}}}};
  throw ConfigError("no built-in defaults for: " + problem);
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["id"] = c.id;
  j["problem"] = c.problem;
  j["solver"] = c.solver;
  j["c_scale"] = c.c_scale;
  j["ct_scale"] = c.ct_scale;
  j["setup"] = Json::object();
  for (const auto& [k, v] : c.setup) j["setup"][k] = v;
  j["kernels"] = Json::object();
  for (const auto& [k, v] : c.kernels) j["kernels"][k] = kernel_json(v);
  if (c.tune) {
    const TuneSpec& t = *c.tune;
    j["tune"] = {{"lo", t.lo}, {"hi", t.hi}, {"per_decade", t.per_decade}, {"w1", t.w1},
                 {"w2", t.w2}, {"w3", t.w3}, {"use_data", t.use_data}};
  }
  if (c.inverse) {
    const InverseSpec& v = *c.inverse;
    j["inverse"] = {{"init", v.init}, {"method", v.method}, {"max_fev", v.max_fev},
                    {"line_step", v.line_step},   {"line_tol", v.line_tol},
                    {"check_identifiability", v.check_identifiability}};
  }
  j["seed"] = c.seed;
  j["allow_unstable"] = c.allow_unstable;
  j["output"] = c.output;
  return j;
}

ExperimentConfig config_from_json(const Json& raw) {
  Json j = resolve_defaults(raw, 0);
  reject_unknown(j, {"id", "problem", "solver", "c_scale", "ct_scale", "setup", "kernels", "tune", "inverse",
                     "seed", "allow_unstable", "output"},
                 "config");
  ExperimentConfig c;
  c.problem = field_or<std::string>(j, "problem", "");
  c.solver = field_or<std::string>(j, "solver", "");
  c.id = field_or<std::string>(j, "id", c.problem + "-" + c.solver);
  c.c_scale = field_or<int>(j, "c_scale", 1);
  c.ct_scale = field_or<int>(j, "ct_scale", 1);
  c.seed = field_or<std::uint64_t>(j, "seed", 0);
  c.allow_unstable = field_or<bool>(j, "allow_unstable", false);
  c.output = field_or<std::string>(j, "output", "");
  if (j.contains("setup")) {
    if (!j["setup"].is_object()) throw ConfigError("setup must be an object");
    for (auto it = j["setup"].begin(); it != j["setup"].end(); ++it) {
      if (it->is_boolean()) c.setup[it.key()] = it->get<bool>() ? 1.0 : 0.0;
      else if (it->is_number()) c.setup[it.key()] = it->get<double>();
      else throw ConfigError("setup." + it.key() + " must be numeric");
    }
  }
  if (j.contains("kernels")) {
    if (!j["kernels"].is_object()) throw ConfigError("kernels must be an object");
    for (auto it = j["kernels"].begin(); it != j["kernels"].end(); ++it) {
      reject_unknown(*it, {"family", "epsilon", "sigma"}, "kernels." + it.key());
      KernelSpec k;
      k.family = field_or<std::string>(*it, "family", "gaussian");
      if (it->contains("sigma")) {
        if (it->contains("epsilon")) throw ConfigError("give either epsilon or sigma, not both");
        double sigma = field_or<double>(*it, "sigma", 1.0);
        if (!(sigma > 0)) throw ConfigError("sigma must be positive");
        k.epsilon = RbfKernel::epsilon_from_sigma(sigma);
      } else {
        k.epsilon = field_or<double>(*it, "epsilon", 1.0);
      }
      try {
        k.family = family_name(parse_family(k.family));
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
      c.kernels[it.key()] = k;
    }
  }
  if (j.contains("tune") && !j["tune"].is_null()) {
    const Json& t = j["tune"];
    reject_unknown(t, {"lo", "hi", "per_decade", "w1", "w2", "w3", "use_data"}, "tune");
    TuneSpec s;
    s.lo = field_or(t, "lo", s.lo);
    s.hi = field_or(t, "hi", s.hi);
    s.per_decade = field_or(t, "per_decade", s.per_decade);
    s.w1 = field_or(t, "w1", s.w1);
    s.w2 = field_or(t, "w2", s.w2);
    s.w3 = field_or(t, "w3", s.w3);
    s.use_data = field_or(t, "use_data", s.use_data);
    c.tune = s;
  }
  if (j.contains("inverse") && !j["inverse"].is_null()) {
    const Json& v = j["inverse"];
    reject_unknown(v, {"init", "method", "max_fev", "line_step", "line_tol", "check_identifiability"}, "inverse");
    InverseSpec s;
    s.init = field_or<std::vector<double>>(v, "init", {});
    s.method = field_or<std::string>(v, "method", s.method);
    s.max_fev = field_or(v, "max_fev", s.max_fev);
    s.line_step = field_or(v, "line_step", s.line_step);
    s.line_tol = field_or(v, "line_tol", s.line_tol);
    s.check_identifiability = field_or(v, "check_identifiability", s.check_identifiability);
    c.inverse = s;
  }
  validate(c);
  check_buildable(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

// ------------------------------------------------------------------ runners
ResultRecord run_forward(const ExperimentConfig& c) {
  validate(c);
  check_buildable(c);
  ResultRecord r = blank_record(c);
  try {
    absorb(r, forward_outcome(c));
  } catch (const std::exception& e) {
    fail(r, e);
  }
  persist(r, c);
  return r;
}

ResultRecord run_inverse(const ExperimentConfig& c) {
  validate(c);
  check_buildable(c);
  if (!c.inverse) throw ConfigError("inverse descriptor missing");
  ResultRecord r = blank_record(c);
  InferOptions opts;
  opts.method = parse_method(c.inverse->method);
  opts.max_fev = c.inverse->max_fev;
  opts.line_step = c.inverse->line_step;
  opts.line_tol = c.inverse->line_tol;
  opts.check_identifiability = c.inverse->check_identifiability;
  try {
    InverseOutcome out;
    if (c.problem == "advection") {
      out = infer_advection_beta(advection_setup(c), c.inverse->init[0], opts);
    } else if (c.problem == "lotka_volterra") {
      Vec init = Eigen::Map<const Vec>(c.inverse->init.data(), 4);
      out = infer_lotka_volterra(lv_setup(c), init, opts);
    } else {
      BurgersSetup s = burgers_setup(c);
      out = infer_burgers_nu(s, parse_burgers_solver(c.solver), c.inverse->init[0], opts);
    }
    r.params = out.params;
    r.train_time_s = out.result.wall_time_s;
    r.extra["loss"] = out.result.loss;
    r.extra["n_fev"] = out.result.n_fev;
    if (opts.check_identifiability) {
      r.extra["min_curvature"] = out.result.min_curvature;
      r.extra["non_identifiable"] = out.result.non_identifiable;
    }
    r.stable = std::isfinite(out.result.loss);
  } catch (const std::exception& e) {
    fail(r, e);
  }
  persist(r, c);
  return r;
}

ResultRecord run_tune(const ExperimentConfig& c) {
  validate(c);
  check_buildable(c);
  if (!c.tune) throw ConfigError("tune descriptor missing");
  ResultRecord r = blank_record(c);
  TuneConfig tc;
  tc.grid = default_grid(c.tune->lo, c.tune->hi, c.tune->per_decade);
  tc.w1 = c.tune->w1;
  tc.w2 = c.tune->w2;
  tc.w3 = c.tune->w3;
  try {
    TuneResult tr;
    ExperimentConfig best = c;
    std::string family = "gaussian";
    if (auto it = c.kernels.find("u"); it != c.kernels.end()) family = it->second.family;
    if (c.problem == "advection") {
      AdvectionSetup s = advection_setup(c);
      if (c.tune->use_data) {
        TuneData d;
        d.points = advection_test_points(s);
        d.values.resize(d.points.rows());
        const Fn1 u0 = s.initial();
        for (Eigen::Index i = 0; i < d.points.rows(); ++i)
          d.values[i] = advection_exact(d.points(i, 0), d.points(i, 1), s.beta, u0);
        tc.data = d;
      }
      tr = tune_linear(
          [&](double eps) {
            AdvectionSetup se = s;
            se.kernel = RbfKernel(parse_family(family), eps);
            return advection_tune_problem(se, c.c_scale, eps);
          },
          tc);
    } else {
      BurgersSetup s = burgers_setup(c);
      Points q = s.test_points();
      if (c.tune->use_data) {
        TuneData d{q, Vec(q.rows())};
        for (Eigen::Index i = 0; i < q.rows(); ++i) d.values[i] = s.exact(q(i, 0), q(i, 1), s.nu);
        tc.data = d;
      }
      const double vol = s.box().volume();
      tr = tune_nonlinear(
          [&](double eps) {
            FullyNonlinearResult fr = burgers_fn_solve(s, s.nu, eps);
            NonlinearTuneOutcome o;
            o.residual_cost = fr.diag.cost;
            o.tv = total_variation(fr.field, q, vol);
            auto field = std::make_shared<SolutionField>(fr.field);
            o.predict = [field](const Points& p) { return field->evaluate(p); };
            return o;
          },
          tc);
    }
    best.kernels["u"] = {family, tr.best_epsilon};
    best.tune.reset();
    absorb(r, forward_outcome(best));
    r.extra["best_epsilon"] = tr.best_epsilon;
    r.extra["candidates"] = static_cast<double>(tr.trace.size());
    r.tune_trace = tr.trace;
    if (r.config) r.config->kernels["u"] = best.kernels["u"];
  } catch (const std::exception& e) {
    fail(r, e);
  }
  persist(r, c);
  return r;
}

ResultRecord run_experiment(const ExperimentConfig& c) {
  if (c.inverse) return run_inverse(c);
  if (c.tune) return run_tune(c);
  return run_forward(c);
}

// ------------------------------------------------------------------ manifests
std::vector<std::string> builtin_manifest_names() {
  return {"advection", "coupled", "burgers", "burgers-fe-stability", "inverse-advection", "inverse-lv", "inverse-burgers"};
}

std::vector<ExperimentConfig> builtin_manifest(const std::string& name) {
  std::vector<Json> docs;
  auto add = [&](const std::string& id, const std::string& problem, Json overrides) {
    overrides["defaults"] = problem;
    overrides["id"] = id;
    docs.push_back(std::move(overrides));
  };
  if (name == "advection") {
    for (int c : {1, 4}) {
      add("advection-km-c" + std::to_string(c), "advection", {{"solver", "linear"}, {"c_scale", c}});
      add("advection-fdm-c" + std::to_string(c), "advection", {{"solver", "fdm"}, {"c_scale", c}});
    }
  } else if (name == "coupled") {
    for (int c : {1, 4}) {
      add("lv-c" + std::to_string(c), "lotka_volterra", {{"c_scale", c}});
      add("maxwell-c" + std::to_string(c), "maxwell", {{"c_scale", c}});
    }
  } else if (name == "burgers") {
    for (const char* s : {"forward_euler", "imex", "backward_euler", "crank_nicolson", "fully_nonlinear"})
      add(std::string("burgers-") + s, "burgers", {{"solver", s}});
  } else if (name == "burgers-fe-stability") {
    for (int ct : {1, 2, 4, 10})
      add("burgers-fe-ct" + std::to_string(ct), "burgers", {{"solver", "forward_euler"}, {"ct_scale", ct}});
  } else if (name == "inverse-advection") {
    add("inverse-advection", "advection", {{"inverse", {{"init", {0.2}}}}});
  } else if (name == "inverse-lv") {
    add("inverse-lv", "lotka_volterra", {{"inverse", {{"init", {1.0, 1.0, 1.0, 1.0}}}}});
  } else if (name == "inverse-burgers") {
    for (const char* s : {"imex", "backward_euler", "crank_nicolson", "fully_nonlinear"})
      add(std::string("inverse-burgers-") + s, "burgers",
          {{"solver", s}, {"inverse", {{"init", {0.1}}, {"line_step", 1.0}, {"line_tol", 1e-3}}}});
  } else {
    throw ConfigError("unknown manifest: " + name);
  }
  std::vector<ExperimentConfig> out;
  for (const Json& d : docs) out.push_back(config_from_json(d));
  return out;
}

SuiteResult run_suite(const std::vector<ExperimentConfig>& manifest, int parallelism) {
  SuiteResult s;
  s.records.resize(manifest.size());
  parallel_for(static_cast<int>(manifest.size()), std::max(parallelism, 1), [&](int i) {
    try {
      s.records[i] = run_experiment(manifest[i]);
    } catch (const std::exception& e) {
      ResultRecord r = blank_record(manifest[i]);
      fail(r, e);
      s.records[i] = r;
    }
  });
  std::stable_sort(s.records.begin(), s.records.end(), [](const ResultRecord& a, const ResultRecord& b) {
    return std::tie(a.problem, a.solver, a.c_scale, a.ct_scale, a.id) <
           std::tie(b.problem, b.solver, b.c_scale, b.ct_scale, b.id);
  });
  s.csv = results_csv(s.records);
  s.timings_csv = timings_csv(s.records);
  s.summary = summary_table(s.records);
  return s;
}

// ------------------------------------------------------------------ plotting
std::vector<std::filesystem::path> emit_plot_data(const ResultRecord& r, const GridSpec& g,
                                                  const std::filesystem::path& dir) {
  if (!r.config) throw ConfigError("record carries no configuration to re-solve");
  const ExperimentConfig& c = *r.config;
  validate(c);
  struct Surface {
    std::string field;
    FieldFn pred, exact;
  };
  std::vector<Surface> surfaces;
  Box box;
  GridSpec grid = g;

  if (c.problem == "advection") {
    AdvectionSetup s = advection_setup(c);
    box = s.box();
    const Fn1 u0 = s.initial();
    const double beta = s.beta;
    FieldFn exact = [u0, beta](const Points& q) {
      Vec v(q.rows());
      for (Eigen::Index i = 0; i < q.rows(); ++i) v[i] = advection_exact(q(i, 0), q(i, 1), beta, u0);
      return v;
    };
    const int f = per_axis_factor(c.c_scale, 2);
    if (c.solver == "fdm") {
      FdmSetup fs;
      fs.beta = s.beta;
      fs.x_lo = s.x_lo;
      fs.x_hi = s.x_hi;
      fs.t_end = s.tf - s.t0;
      fs.nx = s.nx * f;
      fs.courant = s.courant;
      fs.u0 = u0;
      fs.allow_unstable = s.allow_unstable;
      auto res = std::make_shared<FdmResult>(fdm_advection(fs));
      const double t0 = s.t0;
      surfaces.push_back({"u", [res, t0](const Points& q) {
                            Vec v(q.rows());
                            for (Eigen::Index i = 0; i < q.rows(); ++i) v[i] = res->interpolate(q(i, 0), q(i, 1) - t0);
                            return v;
                          },
                          exact});
    } else {
      auto sol = std::make_shared<LinearFieldSolve>(solve_advection(s, f, s.beta, s.kernel));
      surfaces.push_back({"u", [sol](const Points& q) { return sol->field.evaluate(q); }, exact});
    }
  } else if (c.problem == "lotka_volterra") {
    LvSetup s = lv_setup(c);
    box = {Vec{{0.0, 0.0}}, Vec{{0.0, s.T}}};
    grid = {1, g.nx * g.nt};
    auto sol = std::make_shared<LvSolve>(solve_lv(s, c.c_scale, s.params));
    for (int d = 0; d < 2; ++d) {
      FieldFn pred = [sol, d](const Points& q) { return sol->picard.fields[d].evaluate(q.col(1)); };
      FieldFn exact = [s, d](const Points& q) {
        Vec t = q.col(1);
        return Vec(lv_reference(s.params, s.x0, s.y0, t).col(d));
      };
      surfaces.push_back({d == 0 ? "x" : "y", pred, exact});
    }
  } else if (c.problem == "maxwell") {
    MaxwellSetup s = maxwell_setup(c);
    box = {Vec{{0.0, 0.0}}, Vec{{1.0, s.T}}};
    auto sol = std::make_shared<MaxwellSolve>(solve_maxwell(s, c.c_scale));
    const Fn1 f = s.f_or_default(), gg = s.g_or_default();
    const double cc = s.c;
    for (int d = 0; d < 2; ++d) {
      FieldFn pred = [sol, d](const Points& q) { return sol->solve.fields[d].evaluate(q); };
      FieldFn exact = [f, gg, cc, d](const Points& q) {
        Vec v(q.rows());
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
          auto [E, B] = maxwell_exact(q(i, 0), q(i, 1), cc, f, gg);
          v[i] = d == 0 ? E : B;
        }
        return v;
      };
      surfaces.push_back({d == 0 ? "E_z" : "B_y", pred, exact});
    }
  } else {
    BurgersSetup s = burgers_setup(c);
    box = s.box();
    FieldFn exact = [s](const Points& q) {
      Vec v(q.rows());
      for (Eigen::Index i = 0; i < q.rows(); ++i) v[i] = s.exact(q(i, 0), q(i, 1), s.nu);
      return v;
    };
    if (c.solver == "fully_nonlinear") {
      auto fr = std::make_shared<FullyNonlinearResult>(burgers_fn_solve(s, s.nu, s.eps));
      surfaces.push_back({"u", [fr](const Points& q) { return fr->field.evaluate(q); }, exact});
    } else {
      auto mol = std::make_shared<BurgersMol>(burgers_mol(s, scheme_of(c.solver), c.ct_scale, s.nu));
      surfaces.push_back({"u", [mol](const Points& q) { return mol->predict(q); }, exact});
    }
  }

  std::vector<std::filesystem::path> written;
  std::filesystem::create_directories(dir);
  for (size_t i = 0; i < surfaces.size(); ++i) {
    std::string csv = surface_csv(surfaces[i].pred, surfaces[i].exact, box, grid);
    if (i == 0) {
      write_atomic(dir / "surface.csv", csv);
      written.push_back(dir / "surface.csv");
    }
    if (surfaces.size() > 1) {
      auto p = dir / ("surface_" + surfaces[i].field + ".csv");
      write_atomic(p, csv);
      written.push_back(p);
    }
  }
  return written;
}

}  // namespace kansa
