#include "kansa/benchmarks.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

namespace kansa {

using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Points column_points(const Vec& v) {
  Points p(v.size(), 1);
  p.col(0) = v;
  return p;
}

// Coefficients whose field reproduces `values` at `centers` (least squares).
Vec fit_values(const Points& centers, const RbfKernel& k, const Vec& values) {
  return lstsq(kernel_matrix(centers, centers, k), values).x;
}

}  // namespace

int per_axis_factor(int c_scale, int dims) {
  if (c_scale < 1 || dims < 1) throw InvalidInput("C_scale must be a positive integer");
  int s = static_cast<int>(std::lround(std::pow(static_cast<double>(c_scale), 1.0 / dims)));
  int p = 1;
  for (int i = 0; i < dims; ++i) p *= s;
  if (p != c_scale)
    throw InvalidInput("C_scale " + std::to_string(c_scale) + " is not a perfect power of " +
                       std::to_string(dims));
  return s;
}

FieldScore score_field(const std::string& name, const Vec& pred, const Vec& truth) {
  FieldScore f;
  f.field = name;
  f.l2 = l2_risk(pred, truth);
  Risk r = relative_l2_risk(pred, truth);
  f.rel_l2 = r.value;
  f.excluded = r.excluded;
  return f;
}

// ---------------------------------------------------------------- advection

Fn1 AdvectionSetup::initial() const {
  if (u0) return u0;
  return [](double x) { return std::sin(2 * pi * x); };
}

Box AdvectionSetup::box() const { return {Vec{{x_lo, t0}}, Vec{{x_hi, tf}}}; }

AdvectionSystem advection_system(const AdvectionSetup& s, int f, double beta) {
  AdvectionSystem sys;
  sys.set = sample_points(s.box(), {{s.nx * f, s.nt * f}, s.nd * f, s.nb * f});
  const Fn1 u0 = s.initial();
  auto exact = [u0, beta](const Vec& p) { return advection_exact(p[0], p[1], beta, u0); };
  LinearOperatorSpec pde;
  pde.add(1.0, DerivIndex::d(2, 1)).add(beta, DerivIndex::d(2, 0));
  sys.eqs.push_back({pde, [](const Vec&) { return 0.0; }, sys.set.select(GroupKind::Domain)});
  sys.eqs.push_back({LinearOperatorSpec::identity(2), exact, sys.set.select(GroupKind::Initial)});
  sys.eqs.push_back({LinearOperatorSpec::identity(2), exact, sys.set.select(GroupKind::Boundary)});
  return sys;
}

Points advection_test_points(const AdvectionSetup& s) {
  return tensor_grid({linspace(s.x_lo, s.x_hi, s.test_nx), linspace(s.t0, s.tf, s.test_nt)});
}

LinearFieldSolve solve_advection(const AdvectionSetup& s, int f, double beta, const RbfKernel& kernel) {
  AdvectionSystem sys = advection_system(s, f, beta);
  return solve_kansa(sys.eqs, sys.set.points, kernel);
}

namespace {
Vec advection_truth(const AdvectionSetup& s, const Points& q) {
  const Fn1 u0 = s.initial();
  Vec u(q.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) u[i] = advection_exact(q(i, 0), q(i, 1), s.beta, u0);
  return u;
}
}  // namespace

BenchOutcome advection_km_benchmark(const AdvectionSetup& s, int c_scale) {
  const int f = per_axis_factor(c_scale, 2);
  BenchOutcome out;
  AdvectionSystem sys = advection_system(s, f, s.beta);
  Points q = advection_test_points(s);
  Vec truth = advection_truth(s, q);
  auto t0 = Clock::now();
  LinearFieldSolve sol = solve_kansa(sys.eqs, sys.set.points, s.kernel);
  out.train_time_s = seconds_since(t0);
  t0 = Clock::now();
  Vec pred = sol.field.evaluate(q);
  out.infer_time_s = seconds_since(t0);
  out.scores.push_back(score_field("u", pred, truth));
  out.cond_estimate = sol.info.cond_estimate;
  out.extra["rank"] = sol.info.rank;
  out.extra["unknowns"] = static_cast<double>(sys.set.size());
  return out;
}

BenchOutcome advection_fdm_benchmark(const AdvectionSetup& s, int c_scale) {
  const int f = per_axis_factor(c_scale, 2);
  BenchOutcome out;
  FdmSetup fs;
  fs.beta = s.beta;
  fs.x_lo = s.x_lo;
  fs.x_hi = s.x_hi;
  fs.t_end = s.tf - s.t0;
  fs.nx = s.nx * f;
  fs.courant = s.courant;
  fs.u0 = s.initial();
  fs.allow_unstable = s.allow_unstable;
  Points q = advection_test_points(s);
  Vec truth = advection_truth(s, q);
  auto t0 = Clock::now();
  FdmResult r = fdm_advection(fs);
  out.train_time_s = seconds_since(t0);
  t0 = Clock::now();
  Vec pred(q.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) pred[i] = r.interpolate(q(i, 0), q(i, 1) - s.t0);
  out.infer_time_s = seconds_since(t0);
  out.scores.push_back(score_field("u", pred, truth));
  out.stable = pred.allFinite() && r.courant <= 1.0 + 1e-12;
  out.extra["courant"] = r.courant;
  out.extra["steps"] = static_cast<double>(r.t.size() - 1);
  return out;
}

LinearTuneProblem advection_tune_problem(const AdvectionSetup& s, int c_scale, double eps) {
  const int f = per_axis_factor(c_scale, 2);
  AdvectionSystem sys = advection_system(s, f, s.beta);
  LinearTuneProblem p;
  p.eqs = sys.eqs;
  p.centers = sys.set.points;
  p.kernel = RbfKernel(s.kernel.family(), eps);
  p.tv_points = sys.set.points;
  p.volume = s.box().volume();
  return p;
}

// ------------------------------------------------------------ Lotka-Volterra

Points lv_centers(const LvSetup& s, int c_scale) {
  const int n = s.n * c_scale;
  Vec t(n + 1);
  t[0] = 0;
  t.tail(n) = interior_linspace(0, s.T, n);
  return column_points(t);
}

LvSolve solve_lv(const LvSetup& s, int c_scale, const LvParams& p) {
  LvSolve out;
  out.centers = lv_centers(s, c_scale);
  const Points& C = out.centers;
  const Points dom = C.bottomRows(C.rows() - 1);
  const Points ic = C.topRows(1);
  const RbfKernel kx(Family::Gaussian, s.eps_x), ky(Family::Gaussian, s.eps_y);

  std::vector<SolutionField> init;
  if (s.rk4_init) {
    Mat z = lv_reference(p, s.x0, s.y0, C.col(0));
    init.emplace_back(C, kx, fit_values(C, kx, z.col(0)));
    init.emplace_back(C, ky, fit_values(C, ky, z.col(1)));
  } else {
    init.emplace_back(C, kx, fit_values(C, kx, Vec::Constant(C.rows(), s.x0)));
    init.emplace_back(C, ky, fit_values(C, ky, Vec::Constant(C.rows(), s.y0)));
  }

  const DerivIndex I = DerivIndex::identity(1), Dt = DerivIndex::d(1, 0);
  const bool newton = s.newton;
  const double x0 = s.x0, y0 = s.y0;
  SpecBuilder builder = [=](const std::vector<SolutionField>& fields) {
    // Previous iterate, tabulated at the domain points (the only rows needing weights).
    auto xm = std::make_shared<Vec>(fields[0].evaluate(dom));
    auto ym = std::make_shared<Vec>(fields[1].evaluate(dom));
    auto row_of = [dom](const Vec& pt) {
      Eigen::Index i = 0;
      (dom.col(0).array() - pt[0]).abs().minCoeff(&i);
      return i;
    };
    auto tab = [row_of](std::shared_ptr<Vec> v, std::function<double(double, double)> fn,
                        std::shared_ptr<Vec> w) -> ScalarFn {
      return [=](const Vec& pt) {
        Eigen::Index i = row_of(pt);
        return fn((*v)[i], (*w)[i]);
      };
    };
    CoupledSystemSpec spec;
    spec.fields = {{"x", kx}, {"y", ky}};
    spec.centers = C;
    LinearOperatorSpec dt, id;
    dt.add(1.0, Dt);
    id.add(1.0, I);
    CoupledEquation ex, ey, icx, icy;
    ex.points = ey.points = dom;
    ex.blocks.push_back({0, {}, dt});
    ex.blocks.push_back({0, tab(ym, [p](double, double y) { return -p.alpha + p.beta * y; }, ym), id});
    ey.blocks.push_back({1, {}, dt});
    ey.blocks.push_back({1, tab(xm, [p](double x, double) { return p.gamma - p.delta * x; }, xm), id});
    if (newton) {
      ex.blocks.push_back({1, tab(xm, [p](double x, double) { return p.beta * x; }, ym), id});
      ey.blocks.push_back({0, tab(ym, [p](double y, double) { return -p.delta * y; }, xm), id});
      ex.rhs = tab(xm, [p](double x, double y) { return p.beta * x * y; }, ym);
      ey.rhs = tab(xm, [p](double x, double y) { return -p.delta * x * y; }, ym);
    } else {
      ex.rhs = ey.rhs = [](const Vec&) { return 0.0; };
    }
    icx.points = icy.points = ic;
    icx.blocks.push_back({0, {}, id});
    icy.blocks.push_back({1, {}, id});
    icx.rhs = [x0](const Vec&) { return x0; };
    icy.rhs = [y0](const Vec&) { return y0; };
    spec.equations = {ex, ey, icx, icy};
    return spec;
  };
  out.picard = solve_coupled_picard(builder, init, s.max_iter, s.tol);
  return out;
}

BenchOutcome lv_benchmark(const LvSetup& s, int c_scale) {
  BenchOutcome out;
  Vec tt = linspace(0, s.T, s.n_test);
  Mat ref = lv_reference(s.params, s.x0, s.y0, tt);
  auto t0 = Clock::now();
  LvSolve sol = solve_lv(s, c_scale, s.params);
  out.train_time_s = seconds_since(t0);
  t0 = Clock::now();
  Points q = column_points(tt);
  Vec xp = sol.picard.fields[0].evaluate(q), yp = sol.picard.fields[1].evaluate(q);
  out.infer_time_s = seconds_since(t0);
  out.scores.push_back(score_field("x", xp, ref.col(0)));
  out.scores.push_back(score_field("y", yp, ref.col(1)));
  out.stable = xp.allFinite() && yp.allFinite();
  out.extra["iterations"] = sol.picard.iterations;
  out.extra["converged"] = sol.picard.converged;
  out.extra["last_change"] = sol.picard.last_change;
  return out;
}

// ------------------------------------------------------------------ Maxwell

Fn1 MaxwellSetup::f_or_default() const {
  if (f) return f;
  return [](double x) { return std::sin(2 * pi * x) + 0.5 * std::sin(4 * pi * x); };
}

Fn1 MaxwellSetup::g_or_default() const {
  if (g) return g;
  return [](double x) { return std::cos(2 * pi * x) + 0.5 * std::cos(4 * pi * x); };
}

MaxwellSolve solve_maxwell(const MaxwellSetup& s, int c_scale) {
  const int k = per_axis_factor(c_scale, 2);
  MaxwellSolve out;
  Box box{Vec{{0.0, 0.0}}, Vec{{1.0, s.T}}};
  out.set = sample_points(box, {{s.n * k, s.n * k}, s.nd * k, s.boundary_trace ? s.nb * k : 0});
  const Fn1 f = s.f_or_default(), g = s.g_or_default();
  const double c = s.c;
  auto E = [=](const Vec& p) { return maxwell_exact(p[0], p[1], c, f, g).first; };
  auto B = [=](const Vec& p) { return maxwell_exact(p[0], p[1], c, f, g).second; };

  CoupledSystemSpec spec;
  spec.fields = {{"E_z", RbfKernel(Family::Gaussian, s.eps_e)}, {"B_y", RbfKernel(Family::Gaussian, s.eps_b)}};
  spec.centers = out.set.points;
  LinearOperatorSpec wave, id = LinearOperatorSpec::identity(2);
  wave.add(1.0, DerivIndex::d2(2, 1, 1)).add(-c * c, DerivIndex::d2(2, 0, 0));
  const Points dom = out.set.select(GroupKind::Domain);
  const Points ic = out.set.select(GroupKind::Initial);
  const Points bc = out.set.select(GroupKind::Boundary);
  ScalarFn zero = [](const Vec&) { return 0.0; };
  for (int d = 0; d < 2; ++d) {
    ScalarFn truth = d == 0 ? ScalarFn(E) : ScalarFn(B);
    spec.equations.push_back({{{d, {}, wave}}, zero, dom});
    spec.equations.push_back({{{d, {}, id}}, truth, ic});
    if (bc.rows() > 0) spec.equations.push_back({{{d, {}, id}}, truth, bc});
  }
  out.solve = solve_coupled(spec);
  return out;
}

BenchOutcome maxwell_benchmark(const MaxwellSetup& s, int c_scale) {
  BenchOutcome out;
  Points q = tensor_grid({linspace(0, 1, s.test_nx), linspace(0, s.T, s.test_nt)});
  const Fn1 f = s.f_or_default(), g = s.g_or_default();
  Vec Et(q.rows()), Bt(q.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) std::tie(Et[i], Bt[i]) = maxwell_exact(q(i, 0), q(i, 1), s.c, f, g);
  auto t0 = Clock::now();
  MaxwellSolve sol = solve_maxwell(s, c_scale);
  out.train_time_s = seconds_since(t0);
  t0 = Clock::now();
  Vec Ep = sol.solve.fields[0].evaluate(q), Bp = sol.solve.fields[1].evaluate(q);
  out.infer_time_s = seconds_since(t0);
  out.scores.push_back(score_field("E_z", Ep, Et));
  out.scores.push_back(score_field("B_y", Bp, Bt));
  out.cond_estimate = sol.solve.info.cond_estimate;
  return out;
}

// ------------------------------------------------------------------ Burgers

double BurgersSetup::exact(double x, double t, double nu_) const {
  return burgers_exact_steady(x, t, nu_, um, up);
}

double BurgersSetup::boundary(double x, double t, double nu_) const {
  if (exact_bc) return exact(x, t, nu_);
  return x <= 0.5 * (x_lo + x_hi) ? um : up;
}

Points BurgersSetup::test_points() const {
  return tensor_grid({linspace(x_lo, x_hi, test_nx), linspace(0, T, test_nt)});
}

Box BurgersSetup::box() const { return {Vec{{x_lo, 0.0}}, Vec{{x_hi, T}}}; }

Mat burgers_jacobian(const Vec& u, const DiffMatrixSet& dms, double nu) {
  const Mat& Dx = dms.get(DerivIndex::d(1, 0));
  const Mat& Dxx = dms.get(DerivIndex::d2(1, 0, 0));
  Mat J = u.asDiagonal() * Dx - nu * Dxx;
  J.diagonal() += Dx * u;
  return J;
}

NonlinearResidualSpec burgers_residual_spec(const BurgersSetup& s, const DiffMatrixSet& dms, double nu) {
  NonlinearResidualSpec spec;
  spec.op = [nu](const Vec& u, const DiffMatrixSet& d) {
    const Mat& Dx = d.get(DerivIndex::d(1, 0));
    const Mat& Dxx = d.get(DerivIndex::d2(1, 0, 0));
    return Vec(u.cwiseProduct(Dx * u) - nu * (Dxx * u));
  };
  spec.jacobian = [nu](const Vec& u, const DiffMatrixSet& d) { return burgers_jacobian(u, d, nu); };
  NonlinearResidualSpec::StiffSplit split;
  split.implicit = -nu * dms.get(DerivIndex::d2(1, 0, 0));
  split.explicit_ = [](const Vec& u, const DiffMatrixSet& d) {
    return Vec(u.cwiseProduct(d.get(DerivIndex::d(1, 0)) * u));
  };
  spec.stiff_split = split;
  const int n = dms.size();
  spec.boundary_rows = {0, n - 1};
  const double xl = dms.centers()(0, 0), xr = dms.centers()(n - 1, 0);
  spec.boundary_values = [s, nu, xl, xr](double t) {
    return Vec{{s.boundary(xl, t, nu), s.boundary(xr, t, nu)}};
  };
  return spec;
}

BurgersMol burgers_mol(const BurgersSetup& s, SchemeKind kind, int ct_scale, double nu) {
  BurgersMol out;
  Points xc = column_points(linspace(s.x_lo, s.x_hi, s.mol_nx));
  out.dms = std::make_shared<DiffMatrixSet>(xc, RbfKernel(Family::Gaussian, s.eps), s.max_cond);
  NonlinearResidualSpec spec = burgers_residual_spec(s, *out.dms, nu);
  Vec u0(s.mol_nx);
  for (int i = 0; i < s.mol_nx; ++i) u0[i] = s.exact(xc(i, 0), 0.0, nu);
  TimeScheme ts = TimeScheme::spanning(kind, 0.0, s.T, s.base_steps * ct_scale);
  out.traj = march(u0, spec, *out.dms, ts, 0.0, s.inner_opts);
  return out;
}

Vec BurgersMol::predict(const Points& q) const {
  Vec out(q.rows());
  const int nt = static_cast<int>(traj.times.size()) - 1;
  const double t0 = traj.times[0];
  const double dt = (traj.times[nt] - t0) / nt;
  const RbfKernel& k = dms->kernel();
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    double jf = (q(i, 1) - t0) / dt;
    int j0 = std::clamp(static_cast<int>(std::floor(jf + 1e-12)), 0, nt - 1);
    double w = std::clamp(jf - j0, 0.0, 1.0);
    Vec nodal = (1 - w) * traj.states.row(j0).transpose() + w * traj.states.row(j0 + 1).transpose();
    if (!nodal.allFinite()) {
      out[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    Vec a = dms->coefficients(nodal);
    double v = 0;
    for (int c = 0; c < dms->size(); ++c) v += a[c] * k.eval(std::abs(q(i, 0) - dms->centers()(c, 0)));
    out[i] = v;
  }
  return out;
}

BenchOutcome burgers_scheme_benchmark(const BurgersSetup& s, SchemeKind kind, int ct_scale) {
  BenchOutcome out;
  Points q = s.test_points();
  Vec truth(q.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) truth[i] = s.exact(q(i, 0), q(i, 1), s.nu);
  auto t0 = Clock::now();
  BurgersMol mol = burgers_mol(s, kind, ct_scale, s.nu);
  out.train_time_s = seconds_since(t0);
  t0 = Clock::now();
  Vec pred = mol.predict(q);
  out.infer_time_s = seconds_since(t0);
  out.scores.push_back(score_field("u", pred, truth));
  out.stable = !mol.traj.diverged;
  out.cond_estimate = mol.dms->condition();
  out.extra["steps"] = mol.traj.times.size() - 1;
  out.extra["dt"] = s.T / (s.base_steps * ct_scale);
  if (mol.traj.diverged) out.extra["diverged_step"] = mol.traj.diverged_step;
  return out;
}

BurgersSpaceTime burgers_space_time(const BurgersSetup& s, double nu, double eps) {
  BurgersSpaceTime st;
  st.kernel = RbfKernel(Family::Gaussian, eps);
  st.set = sample_points(s.box(), {{s.nx, s.nt}, s.nd, s.nb});
  const Points& C = st.set.points;
  const Points dom = st.set.select(GroupKind::Domain);
  const Points ic = st.set.select(GroupKind::Initial);
  const Points bc = st.set.select(GroupKind::Boundary);
  auto mat = [&](const Points& q, const DerivIndex& idx) {
    LinearOperatorSpec op;
    op.add(1.0, idx);
    return operator_matrix(op, C, q, st.kernel);
  };
  auto P = std::make_shared<Mat>(mat(dom, DerivIndex::identity(2)));
  auto Pt = std::make_shared<Mat>(mat(dom, DerivIndex::d(2, 1)));
  auto Px = std::make_shared<Mat>(mat(dom, DerivIndex::d(2, 0)));
  auto Pxx = std::make_shared<Mat>(mat(dom, DerivIndex::d2(2, 0, 0)));
  auto Ki = std::make_shared<Mat>(mat(ic, DerivIndex::identity(2)));
  auto Kb = std::make_shared<Mat>(mat(bc, DerivIndex::identity(2)));
  auto gi = std::make_shared<Vec>(ic.rows());
  auto gb = std::make_shared<Vec>(bc.rows());
  for (Eigen::Index i = 0; i < ic.rows(); ++i) (*gi)[i] = s.exact(ic(i, 0), ic(i, 1), nu);
  for (Eigen::Index i = 0; i < bc.rows(); ++i) (*gb)[i] = s.boundary(bc(i, 0), bc(i, 1), nu);
  const Eigen::Index nd = dom.rows(), ni = ic.rows(), nb = bc.rows();
  st.problem.centers = C;
  st.problem.residual = [=](const Vec& a) {
    Vec u = *P * a;
    Vec r(nd + ni + nb);
    r.head(nd) = *Pt * a + u.cwiseProduct(*Px * a) - nu * (*Pxx * a);
    r.segment(nd, ni) = *Ki * a - *gi;
    r.tail(nb) = *Kb * a - *gb;
    return r;
  };
  st.problem.jacobian = [=](const Vec& a) {
    Vec u = *P * a, ux = *Px * a;
    Mat J(nd + ni + nb, a.size());
    J.topRows(nd) = *Pt + ux.asDiagonal() * *P + u.asDiagonal() * *Px - nu * *Pxx;
    J.middleRows(nd, ni) = *Ki;
    J.bottomRows(nb) = *Kb;
    return J;
  };
  st.K = kernel_matrix(C, C, st.kernel);
  return st;
}

Vec burgers_ic_warm_start(const BurgersSpaceTime& st, const BurgersSetup& s) {
  const Points& C = st.set.points;
  Vec v(C.rows());
  for (Eigen::Index i = 0; i < C.rows(); ++i) v[i] = s.exact(C(i, 0), 0.0, s.nu);
  return lstsq(st.K, v).x;
}

FullyNonlinearResult burgers_fn_solve(const BurgersSetup& s, double nu, double eps, const Vec* init) {
  BurgersSpaceTime st = burgers_space_time(s, nu, eps);
  Vec a0 = init ? *init : burgers_ic_warm_start(st, s);
  return solve_fully_nonlinear(st.problem, st.kernel, a0, s.fn_opts);
}

BenchOutcome burgers_fn_benchmark(const BurgersSetup& s) {
  BenchOutcome out;
  Points q = s.test_points();
  Vec truth(q.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) truth[i] = s.exact(q(i, 0), q(i, 1), s.nu);
  auto t0 = Clock::now();
  FullyNonlinearResult r = burgers_fn_solve(s, s.nu, s.eps);
  out.train_time_s = seconds_since(t0);
  t0 = Clock::now();
  Vec pred = r.field.evaluate(q);
  out.infer_time_s = seconds_since(t0);
  out.scores.push_back(score_field("u", pred, truth));
  out.stable = pred.allFinite();
  out.extra["iterations"] = r.diag.iterations;
  out.extra["final_cost"] = r.diag.cost;
  out.extra["converged"] = r.diag.converged;
  return out;
}

}  // namespace kansa

namespace kansa {

// ------------------------------------------------------------------ inverse

InverseOutcome infer_advection_beta(const AdvectionSetup& s, double beta0, const InferOptions& opts) {
  AdvectionSystem ref = advection_system(s, 1, s.beta);
  const Points& obs_pts = ref.set.points;
  const Fn1 u0 = s.initial();
  InverseProblem prob;
  prob.observations.resize(obs_pts.rows());
  for (Eigen::Index i = 0; i < obs_pts.rows(); ++i)
    prob.observations[i] = advection_exact(obs_pts(i, 0), obs_pts(i, 1), s.beta, u0);
  prob.init = Vec::Constant(1, beta0);
  prob.forward = [&](const Vec& p) {
    LinearFieldSolve sol = solve_advection(s, 1, p[0], s.kernel);
    return sol.field.evaluate(obs_pts);
  };
  InverseOutcome out;
  out.result = infer(prob, opts);
  out.params.push_back({"beta", beta0, out.result.x[0], s.beta});
  return out;
}

InverseOutcome infer_lotka_volterra_from(const LvSetup& s, const Mat& observations, const Vec& init,
                                         const InferOptions& opts) {
  const Points C = lv_centers(s, 1);
  if (observations.rows() != C.rows() || observations.cols() != 2)
    throw InvalidInput("observations must cover both species at every center time");
  InverseProblem prob;
  prob.observations.resize(2 * C.rows());
  prob.observations << observations.col(0), observations.col(1);
  prob.init = init;
  prob.forward = [&](const Vec& p) {
    LvSolve sol = solve_lv(s, 1, LvParams::from_vec(p));
    Vec out(2 * C.rows());
    out << sol.picard.fields[0].evaluate(C), sol.picard.fields[1].evaluate(C);
    return out;
  };
  InverseOutcome out;
  out.result = infer(prob, opts);
  const char* names[] = {"alpha", "beta", "delta", "gamma"};
  Vec ref = s.params.as_vec();
  for (int i = 0; i < 4; ++i) out.params.push_back({names[i], init[i], out.result.x[i], ref[i]});
  return out;
}

InverseOutcome infer_lotka_volterra(const LvSetup& s, const Vec& init, const InferOptions& opts) {
  const Points C = lv_centers(s, 1);
  Mat obs = lv_reference(s.params, s.x0, s.y0, C.col(0));
  return infer_lotka_volterra_from(s, obs, init, opts);
}

std::string burgers_solver_name(BurgersSolver b) {
  switch (b) {
    case BurgersSolver::ForwardEuler: return "forward_euler";
    case BurgersSolver::Imex: return "imex";
    case BurgersSolver::BackwardEuler: return "backward_euler";
    case BurgersSolver::CrankNicolson: return "crank_nicolson";
    case BurgersSolver::FullyNonlinear: return "fully_nonlinear";
  }
  return "fully_nonlinear";
}

BurgersSolver parse_burgers_solver(const std::string& s) {
  if (s == "fully_nonlinear" || s == "fn") return BurgersSolver::FullyNonlinear;
  switch (parse_scheme(s)) {
    case SchemeKind::ForwardEuler: return BurgersSolver::ForwardEuler;
    case SchemeKind::Imex: return BurgersSolver::Imex;
    case SchemeKind::BackwardEuler: return BurgersSolver::BackwardEuler;
    case SchemeKind::CrankNicolson: return BurgersSolver::CrankNicolson;
  }
  return BurgersSolver::FullyNonlinear;
}

InverseOutcome infer_burgers_nu(const BurgersSetup& s, BurgersSolver solver, double nu0,
                                const InferOptions& opts) {
  InverseProblem prob;
  prob.init = Vec::Constant(1, nu0);
  prob.bounds = std::vector<std::pair<double, double>>{{1e-3, 1e3}};
  if (solver == BurgersSolver::FullyNonlinear) {
    auto st = std::make_shared<BurgersSpaceTime>(burgers_space_time(s, s.nu, s.eps));
    const Points& C = st->set.points;
    prob.observations.resize(C.rows());
    for (Eigen::Index i = 0; i < C.rows(); ++i) prob.observations[i] = s.exact(C(i, 0), C(i, 1), s.nu);
    // Trial solves start from the converged field of the nearest nu seen so far, else from a
    // Crank-Nicolson run at the trial nu.
    auto solved = std::make_shared<std::map<double, Vec>>();
    auto trial = std::make_shared<BurgersSetup>(s);
    trial->fn_opts = s.inverse_fn_opts;
    prob.forward = [trial, st, solved](const Vec& p) {
      Vec start;
      const Vec* init = nullptr;
      double best = INFINITY;
      for (const auto& [nu, a] : *solved)
        if (std::abs(nu - p[0]) < best) best = std::abs(nu - p[0]), init = &a;
      if (!init) {
        BurgersMol mol = burgers_mol(*trial, SchemeKind::CrankNicolson, 4, p[0]);
        start = lstsq(st->K, mol.predict(st->set.points)).x;
        init = &start;
      }
      FullyNonlinearResult r = burgers_fn_solve(*trial, p[0], trial->eps, init);
      if (r.diag.converged) (*solved)[p[0]] = r.field.coeffs();
      return Vec(st->K * r.field.coeffs());
    };
  } else {
    const SchemeKind kind = static_cast<SchemeKind>(static_cast<int>(solver));
    Points xc = column_points(linspace(s.x_lo, s.x_hi, s.mol_nx));
    const int steps = s.base_steps;
    const double dt = s.T / steps;
    prob.observations.resize(steps * s.mol_nx);
    for (int j = 1; j <= steps; ++j)
      for (int i = 0; i < s.mol_nx; ++i) prob.observations[(j - 1) * s.mol_nx + i] = s.exact(xc(i, 0), j * dt, s.nu);
    prob.forward = [&s, kind](const Vec& p) {
      BurgersMol mol = burgers_mol(s, kind, 1, p[0]);
      Mat tail = mol.traj.states.bottomRows(mol.traj.states.rows() - 1);
      Mat rowmajor = tail.transpose();
      return Vec(Eigen::Map<const Vec>(rowmajor.data(), rowmajor.size()));
    };
  }
  InverseOutcome out;
  out.result = infer(prob, opts);
  out.params.push_back({"nu", nu0, out.result.x[0], s.nu});
  return out;
}

}  // namespace kansa
