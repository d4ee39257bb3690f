#pragma once

#include <map>
#include <memory>
#include <string>

#include "kansa/collocation.hpp"
#include "kansa/coupled.hpp"
#include "kansa/inverse.hpp"
#include "kansa/nonlinear.hpp"
#include "kansa/problems.hpp"
#include "kansa/tuning.hpp"

namespace kansa {

struct FieldScore {
  std::string field;
  double l2 = 0;
  double rel_l2 = 0;
  int excluded = 0;
};

struct BenchOutcome {
  std::vector<FieldScore> scores;
  double train_time_s = 0;
  double infer_time_s = 0;
  bool stable = true;
  double cond_estimate = std::numeric_limits<double>::quiet_NaN();
  std::map<std::string, double> extra;
};

// Per-axis multiplier s with s^dims == c_scale; throws unless exact.
int per_axis_factor(int c_scale, int dims);

FieldScore score_field(const std::string& name, const Vec& pred, const Vec& truth);

// ---------------------------------------------------------------- advection
struct AdvectionSetup {
  double beta = 0.4;
  double x_lo = 0, x_hi = 1, t0 = 0, tf = 1;
  int nx = 100, nt = 10, nd = 10, nb = 100;
  int test_nx = 64, test_nt = 8;
  RbfKernel kernel{Family::Gaussian, 3.0};
  Fn1 u0;  // defaults to sin(2 pi x)
  double courant = 0.1;
  bool allow_unstable = false;

  Fn1 initial() const;
  Box box() const;
};

struct AdvectionSystem {
  std::vector<ConstraintEquation> eqs;
  CollocationSet set;
};

AdvectionSystem advection_system(const AdvectionSetup& s, int axis_factor, double beta);
Points advection_test_points(const AdvectionSetup& s);
LinearFieldSolve solve_advection(const AdvectionSetup& s, int axis_factor, double beta,
                                 const RbfKernel& kernel);
BenchOutcome advection_km_benchmark(const AdvectionSetup& s, int c_scale);
BenchOutcome advection_fdm_benchmark(const AdvectionSetup& s, int c_scale);
LinearTuneProblem advection_tune_problem(const AdvectionSetup& s, int c_scale, double eps);

// ------------------------------------------------------------ Lotka-Volterra
struct LvSetup {
  LvParams params;
  double x0 = 40, y0 = 9, T = 200;
  int n = 100;
  double eps_x = 0.21, eps_y = 0.2;
  int n_test = 64;
  bool newton = true;    // false: lag the coupling terms only
  bool rk4_init = true;  // false: constant fields at the initial values
  int max_iter = 100;
  double tol = 1e-8;
};

struct LvSolve {
  PicardResult picard;
  Points centers;
};

Points lv_centers(const LvSetup& s, int c_scale);
LvSolve solve_lv(const LvSetup& s, int c_scale, const LvParams& p);
BenchOutcome lv_benchmark(const LvSetup& s, int c_scale);

// ------------------------------------------------------------------ Maxwell
struct MaxwellSetup {
  double c = 1.0, T = 0.5;
  int n = 12, nd = 24, nb = 12;
  double eps_e = 16, eps_b = 16;
  int test_nx = 10, test_nt = 10;
  bool boundary_trace = true;
  Fn1 f, g;  // default to the benchmark initial profiles

  Fn1 f_or_default() const;
  Fn1 g_or_default() const;
};

struct MaxwellSolve {
  CoupledSolve solve;
  CollocationSet set;
};

MaxwellSolve solve_maxwell(const MaxwellSetup& s, int c_scale);
BenchOutcome maxwell_benchmark(const MaxwellSetup& s, int c_scale);

// ------------------------------------------------------------------ Burgers
struct BurgersSetup {
  double nu = 0.5;
  double x_lo = -10, x_hi = 10, T = 4;
  double um = 1, up = 0;
  int nx = 64, nt = 16, nd = 64, nb = 16;
  int test_nx = 48, test_nt = 12;
  double eps = 0.9;
  bool exact_bc = true;  // false: constant far-field limits at the walls
  int mol_nx = 48;       // spatial centers for the time-stepping schemes
  int base_steps = 16;   // steps at C_t_scale = 1
  double max_cond = 1e13;
  NllsOptions fn_opts{500};
  NllsOptions inner_opts{200};
  NllsOptions inverse_fn_opts{40, 1e-8};  // trial solves inside the nu search

  double exact(double x, double t, double nu_) const;
  double boundary(double x, double t, double nu_) const;
  Points test_points() const;
  Box box() const;
};

NonlinearResidualSpec burgers_residual_spec(const BurgersSetup& s, const DiffMatrixSet& dms, double nu);
Mat burgers_jacobian(const Vec& u, const DiffMatrixSet& dms, double nu);

struct BurgersMol {
  Trajectory traj;
  std::shared_ptr<DiffMatrixSet> dms;
  // RBF interpolation in space, linear in time; NaN once the run diverged.
  Vec predict(const Points& q) const;
};

BurgersMol burgers_mol(const BurgersSetup& s, SchemeKind kind, int ct_scale, double nu);
BenchOutcome burgers_scheme_benchmark(const BurgersSetup& s, SchemeKind kind, int ct_scale);

struct BurgersSpaceTime {
  SpaceTimeProblem problem;
  CollocationSet set;
  RbfKernel kernel;
  Mat K;  // kernel matrix at the centers
};

BurgersSpaceTime burgers_space_time(const BurgersSetup& s, double nu, double eps);
Vec burgers_ic_warm_start(const BurgersSpaceTime& st, const BurgersSetup& s);
FullyNonlinearResult burgers_fn_solve(const BurgersSetup& s, double nu, double eps,
                                      const Vec* init = nullptr);
BenchOutcome burgers_fn_benchmark(const BurgersSetup& s);

// ------------------------------------------------------------------ inverse
struct ParamReport {
  std::string name;
  double initial = 0, recovered = 0, reference = 0;
};

struct InverseOutcome {
  InferResult result;
  std::vector<ParamReport> params;
};

InverseOutcome infer_advection_beta(const AdvectionSetup& s, double beta0, const InferOptions& opts);
InverseOutcome infer_lotka_volterra(const LvSetup& s, const Vec& init, const InferOptions& opts);
// Equilibrium-trajectory variant used to exercise the identifiability check.
InverseOutcome infer_lotka_volterra_from(const LvSetup& s, const Mat& observations, const Vec& init,
                                         const InferOptions& opts);

enum class BurgersSolver { ForwardEuler, Imex, BackwardEuler, CrankNicolson, FullyNonlinear };
std::string burgers_solver_name(BurgersSolver b);
BurgersSolver parse_burgers_solver(const std::string& s);

InverseOutcome infer_burgers_nu(const BurgersSetup& s, BurgersSolver solver, double nu0,
                                const InferOptions& opts);

}  // namespace kansa
