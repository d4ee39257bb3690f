// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kansa/experiment.hpp"

using namespace kansa;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double rel(const BenchOutcome& o, size_t field = 0) { return o.scores.at(field).rel_l2; }

// ------------------------------------------------------------------ forward
Verdict advection_forward() {
  Verdict v;
  AdvectionSetup s;
  auto t = Clock::now();
  BenchOutcome c1 = advection_km_benchmark(s, 1);
  BenchOutcome c4 = advection_km_benchmark(s, 4);
  const double elapsed = seconds_since(t);
  v.require(rel(c1) <= 5e-3, fmt("C=1 rel %.3e <= 5e-3", rel(c1)));
  v.require(rel(c4) < 1e-4, fmt("C=2^2 rel %.3e < 1e-4", rel(c4)));
  v.require(rel(c1) >= 100 * rel(c4), fmt("ratio %.0f >= 100", rel(c1) / rel(c4)));
  v.require(elapsed < 30, fmt("%.1f s < 30 s", elapsed));
  return v;
}

Verdict fdm_baseline() {
  Verdict v;
  AdvectionSetup s;
  std::vector<double> r;
  for (int c : {1, 4, 16, 100}) r.push_back(rel(advection_fdm_benchmark(s, c)));
  v.require(r[0] >= 2e-2 && r[0] <= 6e-2, fmt("C=1 rel %.3e in [2e-2, 6e-2]", r[0]));
  bool dec = true;
  for (size_t i = 1; i < r.size(); ++i) dec = dec && r[i] < r[i - 1];
  std::ostringstream os;
  os << "decreasing over C=1,4,16,100:";
  for (double x : r) os << " " << fmt("%.3e", x);
  v.require(dec, os.str());
  return v;
}

Verdict burgers_schemes() {
  Verdict v;
  BurgersSetup s;
  const bool fe_stable = burgers_scheme_benchmark(s, SchemeKind::ForwardEuler, 1).stable;
  const double imex = rel(burgers_scheme_benchmark(s, SchemeKind::Imex, 1));
  const double be = rel(burgers_scheme_benchmark(s, SchemeKind::BackwardEuler, 1));
  const double cn = rel(burgers_scheme_benchmark(s, SchemeKind::CrankNicolson, 1));
  const double fn = rel(burgers_fn_benchmark(s));
  v.require(fn < cn && cn < be, fmt("FN %.3e < CN %.3e", fn, cn) + fmt(" < BE %.3e", be));
  v.require(cn < imex, fmt("CN < IMEX %.3e", imex));
  v.require(cn <= 2.6e-2, "CN <= 2.6e-2");
  v.require(fn <= 1e-3, "FN <= 1e-3");
  v.require(!fe_stable, "FE unstable at base dt");
  return v;
}

Verdict stability_split() {
  Verdict v;
  BurgersSetup s;
  for (int ct : {1, 2, 4, 10}) {
    BenchOutcome o = burgers_scheme_benchmark(s, SchemeKind::ForwardEuler, ct);
    const std::string tag = "ct=" + std::to_string(ct);
    if (ct <= 2) v.require(!o.stable, tag + " unstable");
    else v.require(o.stable && rel(o) <= 1e-2, tag + fmt(" stable rel %.3e <= 1e-2", rel(o)));
  }
  return v;
}

// ------------------------------------------------------------------ inverse
Verdict inverse_advection() {
  Verdict v;
  InverseOutcome o = infer_advection_beta(AdvectionSetup{}, 0.2, {});
  const double b = o.params[0].recovered;
  v.require(std::abs(b - 0.4) <= 5e-3, fmt("beta %.5f within 5e-3 of 0.4 (%g fev)", b, o.result.n_fev));
  return v;
}

Verdict inverse_lv() {
  Verdict v;
  LvSetup s;
  InverseOutcome o = infer_lotka_volterra(s, Vec::Ones(4), {});
  for (const auto& p : o.params) {
    const double err = std::abs(p.recovered - p.reference) / p.reference;
    v.require(err <= 0.05, p.name + fmt(" %.4g (%.1f%%)", p.recovered, 100 * err));
  }
  v.require(true, fmt("loss %.3e", o.result.loss));
  return v;
}

Verdict inverse_burgers() {
  Verdict v;
  BurgersSetup s;
  InferOptions opts;
  opts.line_step = 1;
  opts.line_tol = 1e-3;
  for (auto b : {BurgersSolver::CrankNicolson, BurgersSolver::FullyNonlinear}) {
    InverseOutcome o = infer_burgers_nu(s, b, 0.1, opts);
    const double nu = o.params[0].recovered;
    v.require(std::abs(nu - 0.5) <= 0.01, burgers_solver_name(b) + fmt(" nu %.4f", nu));
  }
  return v;
}

// ------------------------------------------------------------------ coupled
Verdict coupled_trend() {
  Verdict v;
  LvSetup lv;
  BenchOutcome l1 = lv_benchmark(lv, 1), l4 = lv_benchmark(lv, 4);
  for (size_t f = 0; f < 2; ++f)
    v.require(rel(l4, f) < rel(l1, f), "LV " + l1.scores[f].field + fmt(" %.3e -> %.3e", rel(l1, f), rel(l4, f)));
  MaxwellSetup mx;
  BenchOutcome m1 = maxwell_benchmark(mx, 1), m4 = maxwell_benchmark(mx, 4);
  const double ref1[] = {0.8049189, 0.5894967}, ref4[] = {0.4383743, 0.3830594};
  for (size_t f = 0; f < 2; ++f) {
    const std::string name = "Maxwell " + m1.scores[f].field;
    v.require(rel(m4, f) < rel(m1, f), name + fmt(" %.3f -> %.3f", rel(m1, f), rel(m4, f)));
    auto within2 = [](double x, double r) { return x >= r / 2 && x <= 2 * r; };
    v.require(within2(rel(m1, f), ref1[f]), name + fmt(" C=1 within 2x of %.3f", ref1[f]));
    v.require(within2(rel(m4, f), ref4[f]), name + fmt(" C=4 within 2x of %.3f", ref4[f]));
  }
  return v;
}

// ------------------------------------------------------------------ properties
bool kernel_fd_checks() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1), ue(0.3, 3);
  const double h = 1e-5;
  for (Family fam : {Family::Gaussian, Family::InverseQuadratic, Family::Multiquadric}) {
    for (int trial = 0; trial < 1000; ++trial) {
      RbfKernel k(fam, ue(rng));
      Vec c(2), q(2);
      c << u(rng), u(rng);
      q << u(rng), u(rng);
      for (int a = 0; a < 2; ++a) {
        Vec qp = q, qm = q;
        qp[a] += h, qm[a] -= h;
        const double fd1 = (k.eval_partial(DerivIndex::identity(2), c, qp) - k.eval_partial(DerivIndex::identity(2), c, qm)) / (2 * h);
        if (std::abs(fd1 - k.eval_partial(DerivIndex::d(2, a), c, q)) > 1e-6) return false;
        for (int b = 0; b < 2; ++b) {
          const double fd2 =
              (k.eval_partial(DerivIndex::d(2, b), c, qp) - k.eval_partial(DerivIndex::d(2, b), c, qm)) / (2 * h);
          if (std::abs(fd2 - k.eval_partial(DerivIndex::d2(2, a, b), c, q)) > 1e-4) return false;
        }
      }
    }
  }
  return true;
}

bool ls_orthogonality() {
  AdvectionSetup s;
  s.nx = 20, s.nt = 6, s.nd = 10, s.nb = 12;
  s.kernel = RbfKernel(Family::Gaussian, 10.0);  // width matched to the coarse layout
  AdvectionSystem sys = advection_system(s, 1, s.beta);
  StackedSystem st = stack_system(sys.eqs, sys.set.points, s.kernel);
  // Overdetermine by repeating the first ten rows with a perturbed right-hand side.
  Mat F(st.F.rows() + 10, st.F.cols());
  Vec h(F.rows());
  F << st.F, st.F.topRows(10);
  h << st.h, st.h.head(10).array() + 0.1;
  Vec a = solve_linear(F, h).a;
  Vec r = h - F * a;
  return (F.transpose() * r).norm() <= 1e-6 * F.norm() * r.norm();
}

bool diff_matrix_refinement() {
  double prev = INFINITY;
  for (int n : {10, 20, 40}) {
    Points C = linspace(0, 1, n);
    DiffMatrixSet dms(C, RbfKernel(Family::Gaussian, 0.35 * n), 1e13);
    Vec u(n), want(n);
    for (int i = 0; i < n; ++i) u[i] = std::sin(2 * M_PI * C(i, 0)), want[i] = 2 * M_PI * std::cos(2 * M_PI * C(i, 0));
    Vec got = dms.get(DerivIndex::d(1, 0)) * u;
    double err = 0;
    for (int i = n / 4; i < 3 * n / 4; ++i) err = std::max(err, std::abs(got[i] - want[i]));
    if (!(err < prev)) return false;
    prev = err;
  }
  return true;
}

bool burgers_jacobian_fd() {
  BurgersSetup s;
  DiffMatrixSet dms(linspace(s.x_lo, s.x_hi, s.mol_nx), RbfKernel(Family::Gaussian, s.eps), s.max_cond);
  Vec u(s.mol_nx);
  for (int i = 0; i < s.mol_nx; ++i) u[i] = s.exact(dms.centers()(i, 0), 1.0, s.nu);
  NonlinearResidualSpec spec = burgers_residual_spec(s, dms, s.nu);
  ResidualFn N = [&](const Vec& v) { return spec.op(v, dms); };
  Mat fd = fd_jacobian(N, u, N(u));
  Mat J = burgers_jacobian(u, dms, s.nu);
  return (fd - J).cwiseAbs().maxCoeff() / std::max(1.0, J.cwiseAbs().maxCoeff()) < 1e-5;
}

bool lv_invariant_drift() {
  LvParams p;
  Mat traj = lv_reference(p, 40, 9, Vec::LinSpaced(201, 0, 200));
  const double c0 = lv_invariant(40, 9, p);
  for (int i = 0; i < traj.rows(); ++i)
    if (std::abs(lv_invariant(traj(i, 0), traj(i, 1), p) - c0) > 1e-6) return false;
  return true;
}

bool crank_nicolson_order() {
  BurgersSetup s;
  auto last = [&](int ct) {
    BurgersMol m = burgers_mol(s, SchemeKind::CrankNicolson, ct, s.nu);
    return Vec(m.traj.states.bottomRows(1).transpose());
  };
  const Vec ref = last(64);
  const double ratio = (last(1) - ref).cwiseAbs().maxCoeff() / (last(2) - ref).cwiseAbs().maxCoeff();
  return ratio >= 3 && ratio <= 5;
}

bool tuner_argmin_determinism() {
  AdvectionSetup s;
  s.nx = 16, s.nt = 6, s.nd = 10, s.nb = 6;
  TuneConfig cfg;
  cfg.grid = default_grid(0.5, 20, 4);
  auto builder = [&](double eps) {
    AdvectionSetup se = s;
    se.kernel = RbfKernel(Family::Gaussian, eps);
    return advection_tune_problem(se, 1, eps);
  };
  TuneResult a = tune_linear(builder, cfg), b = tune_linear(builder, cfg);
  double best = INFINITY;
  for (const auto& e : a.trace)
    if (e.selected) best = e.objective;
  for (size_t i = 0; i < a.trace.size(); ++i) {
    if (a.trace[i].objective != b.trace[i].objective) return false;
    if (best > a.trace[i].objective) return false;
  }
  return a.best_epsilon == b.best_epsilon;
}

bool csv_json_round_trip() {
  std::vector<ExperimentConfig> m;
  for (const char* solver : {"fdm", "linear"})
    m.push_back(config_from_json({{"defaults", "advection"},
                                  {"id", std::string("rt-") + solver},
                                  {"solver", solver},
                                  {"setup", {{"nx", 20}, {"nt", 6}, {"nd", 10}, {"nb", 12}}}}));
  SuiteResult a = run_suite(m, 1), b = run_suite(m, 2);
  if (a.csv != b.csv) return false;
  for (const auto& r : a.records) {
    ResultRecord back = record_from_json(Json::parse(dump_json(to_json(r))));
    if (dump_json(to_json(back)) != dump_json(to_json(r))) return false;
    if (results_csv({back}) != results_csv({r})) return false;
    if (!r.config || config_from_json(to_json(*r.config)) != *r.config) return false;
  }
  return true;
}

Verdict property_suite() {
  Verdict v;
  const std::pair<const char*, std::function<bool()>> checks[] = {
      {"kernel FD", kernel_fd_checks},
      {"LS orthogonality", ls_orthogonality},
      {"diff-matrix refinement", diff_matrix_refinement},
      {"Burgers Jacobian", burgers_jacobian_fd},
      {"LV invariant", lv_invariant_drift},
      {"CN order", crank_nicolson_order},
      {"tuner argmin/determinism", tuner_argmin_determinism},
      {"CSV/JSON round trip", csv_json_round_trip},
  };
  for (const auto& [name, fn] : checks) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception&) {
      ok = false;
    }
    v.require(ok, name);
  }
  return v;
}

}  // namespace

int main() {
  const std::pair<const char*, Verdict (*)()> criteria[] = {
      {"1 advection forward", advection_forward},
      {"2 FDM baseline", fdm_baseline},
      {"3 Burgers schemes", burgers_schemes},
      {"4 stability split", stability_split},
      {"5 inverse advection", inverse_advection},
      {"6 inverse Lotka-Volterra", inverse_lv},
      {"7 inverse Burgers", inverse_burgers},
      {"8 coupled forward trend", coupled_trend},
      {"9 property suite", property_suite},
  };
  int failures = 0;
  const auto start = Clock::now();
  for (const auto& [name, run] : criteria) {
    const auto t = Clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failures += !v.pass;
    std::printf("[%s] criterion %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", name, seconds_since(t), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 9 criteria passed in %.1f s\n", 9 - failures, seconds_since(start));
  return failures ? 1 : 0;
}
