#pragma once

#include <map>
#include <optional>

#include "kansa/collocation.hpp"

namespace kansa {

struct SingularBasis : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepFailure : std::runtime_error {
  StepFailure(const std::string& what, double residual_norm)
      : std::runtime_error(what), residual_norm(residual_norm) {}
  double residual_norm;
};

struct Divergence : std::runtime_error {
  Divergence(const std::string& what, int step) : std::runtime_error(what), step(step) {}
  int step;
};

class DiffMatrixSet {
 public:
  DiffMatrixSet(Points centers, RbfKernel kernel, double max_cond = 1e12);

  const Points& centers() const { return centers_; }
  const RbfKernel& kernel() const { return kernel_; }
  double condition() const { return cond_; }
  int size() const { return static_cast<int>(centers_.rows()); }
  const Mat& K() const { return K_; }

  // K_idx K^{-1}, cached per index.
  const Mat& get(const DerivIndex& idx) const;
  // Coefficients reproducing nodal values u.
  Vec coefficients(const Vec& u) const;

 private:
  Points centers_;
  RbfKernel kernel_;
  Mat K_;
  Eigen::PartialPivLU<Mat> lu_;
  double cond_ = 0;
  mutable std::map<DerivIndex, Mat> cache_;
};

Mat build_diff_matrix(const Points& centers, const RbfKernel& kernel, const DerivIndex& idx,
                      double max_cond = 1e12);

using StateFn = std::function<Vec(const Vec&, const DiffMatrixSet&)>;
using StateJac = std::function<Mat(const Vec&, const DiffMatrixSet&)>;

// Method-of-lines form u_t + N[u] = 0 on spatial centers.
struct NonlinearResidualSpec {
  StateFn op;
  StateJac jacobian;  // dN/du, optional
  struct StiffSplit {
    Mat implicit;      // linear stiff part L, N = L u + E(u)
    StateFn explicit_;  // non-stiff remainder E
  };
  std::optional<StiffSplit> stiff_split;
  std::vector<int> boundary_rows;
  std::function<Vec(double)> boundary_values;  // one value per boundary row
};

enum class SchemeKind { ForwardEuler, Imex, BackwardEuler, CrankNicolson };
std::string scheme_name(SchemeKind k);
SchemeKind parse_scheme(const std::string& s);

struct TimeScheme {
  SchemeKind kind = SchemeKind::CrankNicolson;
  double dt = 0;
  int steps = 0;
  static TimeScheme spanning(SchemeKind kind, double t0, double tf, int steps);
};

struct NllsOptions {
  int max_iter = 200;
  double ftol = 1e-12;  // stop once an accepted step lowers the cost by <= ftol * max(cost, 1)
  double xtol = 1e-12;  // or the step is below xtol * (xtol + |x|)
  double lambda0 = 1e-3;
  bool normal_equations = false;  // Cholesky on J^T J + lambda I instead of QR
};

struct NllsResult {
  Vec x;
  bool converged = false;
  double cost = 0;  // sum of squared residuals
  int iterations = 0;
  int n_fev = 0;
};

using ResidualFn = std::function<Vec(const Vec&)>;
using JacobianFn = std::function<Mat(const Vec&)>;

Mat fd_jacobian(const ResidualFn& r, const Vec& x, const Vec& r0);

NllsResult nlls_minimize(const ResidualFn& residual, const JacobianFn& jacobian, const Vec& x0,
                         const NllsOptions& opts = {});

void apply_boundary(Vec& u, const NonlinearResidualSpec& spec, double t);

Vec step_forward_euler(const Vec& u_n, const NonlinearResidualSpec& spec, const DiffMatrixSet& dms,
                       double dt, double t_next);
Vec step_imex(const Vec& u_n, const NonlinearResidualSpec& spec, const DiffMatrixSet& dms,
              double dt, double t_next);
Vec step_implicit(const Vec& u_n, const NonlinearResidualSpec& spec, const DiffMatrixSet& dms,
                  double dt, double t_next, SchemeKind scheme, const NllsOptions& opts = {});

struct Trajectory {
  Vec times;
  Mat states;  // (steps + 1) x N, row n at times[n]
  bool diverged = false;
  int diverged_step = -1;
  double final_inner_cost = 0;
};

// Marches u0 from t0; stops and flags divergence on non-finite states or |u| above blowup.
Trajectory march(const Vec& u0, const NonlinearResidualSpec& spec, const DiffMatrixSet& dms,
                 const TimeScheme& scheme, double t0, const NllsOptions& inner = {},
                 double blowup = 1e10);

struct SpaceTimeProblem {
  Points centers;
  ResidualFn residual;  // of the coefficient vector
  JacobianFn jacobian;  // optional
};

struct FullyNonlinearResult {
  SolutionField field;
  NllsResult diag;
};

FullyNonlinearResult solve_fully_nonlinear(const SpaceTimeProblem& problem, const RbfKernel& kernel,
                                           const Vec& init, const NllsOptions& opts = {500});

// Linear constraints posed as residual F a - h, for cross-checking the nonlinear path.
SpaceTimeProblem linear_space_time_problem(const std::vector<ConstraintEquation>& eqs,
                                           const Points& centers, const RbfKernel& kernel);

}  // namespace kansa
