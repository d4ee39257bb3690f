#include "kansa/nonlinear.hpp"

#include <lapacke.h>

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace kansa {

DiffMatrixSet::DiffMatrixSet(Points centers, RbfKernel kernel, double max_cond)
    : centers_(std::move(centers)), kernel_(kernel) {
  if (centers_.rows() == 0) throw InvalidInput("no centers");
  K_ = kernel_matrix(centers_, centers_, kernel_);
  cond_ = condition_number(K_);
  if (!(cond_ <= max_cond)) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index i = 0; i < centers_.rows(); ++i)
      for (Eigen::Index j = i + 1; j < centers_.rows(); ++j) {
        double d = (centers_.row(i) - centers_.row(j)).norm();
        if (d < best) best = d, bi = i, bj = j;
      }
    std::ostringstream msg;
    msg << "kernel matrix condition " << cond_ << " exceeds " << max_cond
        << "; closest centers are " << bi << " and " << bj << " at distance " << best;
    throw SingularBasis(msg.str());
  }
  lu_.compute(K_);
}

const Mat& DiffMatrixSet::get(const DerivIndex& idx) const {
  auto it = cache_.find(idx);
  if (it != cache_.end()) return it->second;
  LinearOperatorSpec op;
  op.add(1.0, idx);
  Mat Kidx = operator_matrix(op, centers_, centers_, kernel_);
  // K is symmetric, so (K_idx K^-1)^T = K^-1 K_idx^T.
  Mat D = lu_.solve(Kidx.transpose()).transpose();
  return cache_.emplace(idx, std::move(D)).first->second;
}

Vec DiffMatrixSet::coefficients(const Vec& u) const { return lu_.solve(u); }

Mat build_diff_matrix(const Points& centers, const RbfKernel& kernel, const DerivIndex& idx,
                      double max_cond) {
  DiffMatrixSet dms(centers, kernel, max_cond);
  return dms.get(idx);
}

std::string scheme_name(SchemeKind k) {
  switch (k) {
    case SchemeKind::ForwardEuler: return "forward_euler";
    case SchemeKind::Imex: return "imex";
    case SchemeKind::BackwardEuler: return "backward_euler";
    case SchemeKind::CrankNicolson: return "crank_nicolson";
  }
  return "crank_nicolson";
}

SchemeKind parse_scheme(const std::string& s) {
  if (s == "forward_euler" || s == "fe") return SchemeKind::ForwardEuler;
  if (s == "imex") return SchemeKind::Imex;
  if (s == "backward_euler" || s == "be") return SchemeKind::BackwardEuler;
  if (s == "crank_nicolson" || s == "cn") return SchemeKind::CrankNicolson;
  throw std::invalid_argument("unknown time scheme: " + s);
}

TimeScheme TimeScheme::spanning(SchemeKind kind, double t0, double tf, int steps) {
  if (steps < 1) throw InvalidInput("time scheme needs at least one step");
  if (!(tf > t0)) throw InvalidInput("time span must be positive");
  return {kind, (tf - t0) / steps, steps};
}

Mat fd_jacobian(const ResidualFn& r, const Vec& x, const Vec& r0) {
  Mat J(r0.size(), x.size());
  Vec xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    double h = 1e-7 * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    J.col(j) = (r(xp) - r0) / h;
    xp[j] = x[j];
  }
  return J;
}

namespace {

double sumsq(const Vec& r) {
  double c = r.squaredNorm();
  return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
}

// Solves min |J s + r|^2 + lambda |s|^2 through QR of the stacked matrix.
bool damped_step_qr(const Mat& J, const Vec& r, double lambda, Vec& step) {
  const lapack_int m = static_cast<lapack_int>(J.rows());
  const lapack_int n = static_cast<lapack_int>(J.cols());
  Mat A(m + n, n);
  A.topRows(m) = J;
  A.bottomRows(n) = std::sqrt(lambda) * Mat::Identity(n, n);
  Vec b = Vec::Zero(m + n);
  b.head(m) = -r;
  lapack_int info = LAPACKE_dgels(LAPACK_COL_MAJOR, 'N', m + n, n, 1, A.data(), m + n, b.data(), m + n);
  if (info != 0) return false;
  step = b.head(n);
  return step.allFinite();
}

}  // namespace

NllsResult nlls_minimize(const ResidualFn& residual, const JacobianFn& jacobian, const Vec& x0,
                         const NllsOptions& opts) {
  NllsResult res;
  res.x = x0;
  if (!x0.allFinite()) throw InvalidInput("nlls: non-finite start");
  Vec r = residual(res.x);
  res.n_fev = 1;
  if (!r.allFinite()) throw InvalidInput("nlls: residual not finite at start");
  res.cost = r.squaredNorm();
  double lambda = opts.lambda0;
  if (res.cost == 0) {
    res.converged = true;
    return res;
  }
  for (int it = 0; it < opts.max_iter; ++it) {
    res.iterations = it + 1;
    Mat J = jacobian ? jacobian(res.x) : fd_jacobian(residual, res.x, r);
    if (!jacobian) res.n_fev += static_cast<int>(res.x.size());
    Mat JtJ;
    Vec g;
    if (opts.normal_equations) {
      JtJ = J.transpose() * J;
      g = J.transpose() * r;
    }
    bool accepted = false;
    bool stop = false;
    while (!accepted && !stop) {
      Vec step;
      bool ok;
      if (opts.normal_equations) {
        Mat A = JtJ;
        A.diagonal().array() += lambda;
        Eigen::LLT<Mat> llt(A);
        ok = llt.info() == Eigen::Success;
        if (ok) step = -llt.solve(g);
        ok = ok && step.allFinite();
      } else {
        ok = damped_step_qr(J, r, lambda, step);
      }
      if (!ok) {
        lambda *= 10;
        if (lambda > 1e16) stop = true;
        continue;
      }
      const double xnorm = res.x.norm();
      const bool tiny = step.norm() <= opts.xtol * (opts.xtol + xnorm);
      Vec xn = res.x + step;
      Vec rn = residual(xn);
      ++res.n_fev;
      double cn = sumsq(rn);
      if (cn < res.cost) {
        const double drop = res.cost - cn;
        const double prev = res.cost;
        res.x = std::move(xn);
        r = std::move(rn);
        res.cost = cn;
        lambda = std::max(lambda / 10, 1e-20);
        accepted = true;
        if (cn == 0 || drop <= opts.ftol * std::max(prev, 1.0) || tiny) {
          res.converged = true;
          return res;
        }
      } else {
        if (tiny) {
          res.converged = true;
          return res;
        }
        lambda *= 10;
        if (lambda > 1e16) stop = true;
      }
    }
    if (stop) return res;
  }
  return res;
}

void apply_boundary(Vec& u, const NonlinearResidualSpec& spec, double t) {
  if (spec.boundary_rows.empty()) return;
  Vec g = spec.boundary_values(t);
  for (size_t k = 0; k < spec.boundary_rows.size(); ++k) u[spec.boundary_rows[k]] = g[k];
}

Vec step_forward_euler(const Vec& u_n, const NonlinearResidualSpec& spec, const DiffMatrixSet& dms,
                       double dt, double t_next) {
  Vec u = u_n - dt * spec.op(u_n, dms);
  apply_boundary(u, spec, t_next);
  if (!u.allFinite()) throw Divergence("forward Euler produced non-finite values", -1);
  return u;
}

Vec step_imex(const Vec& u_n, const NonlinearResidualSpec& spec, const DiffMatrixSet& dms,
              double dt, double t_next) {
  if (!spec.stiff_split) throw InvalidInput("IMEX needs a stiff/non-stiff split");
  const auto& split = *spec.stiff_split;
  const Eigen::Index n = u_n.size();
  Mat A = Mat::Identity(n, n) + dt * split.implicit;
  Vec b = u_n - dt * split.explicit_(u_n, dms);
  if (!spec.boundary_rows.empty()) {
    Vec g = spec.boundary_values(t_next);
    for (size_t k = 0; k < spec.boundary_rows.size(); ++k) {
      int i = spec.boundary_rows[k];
      A.row(i).setZero();
      A(i, i) = 1.0;
      b[i] = g[k];
    }
  }
  Eigen::PartialPivLU<Mat> lu(A);
  Vec u = lu.solve(b);
  if (!u.allFinite()) throw StepFailure("IMEX implicit matrix is singular", b.norm());
  return u;
}

Vec step_implicit(const Vec& u_n, const NonlinearResidualSpec& spec, const DiffMatrixSet& dms,
                  double dt, double t_next, SchemeKind scheme, const NllsOptions& opts) {
  if (scheme != SchemeKind::BackwardEuler && scheme != SchemeKind::CrankNicolson)
    throw InvalidInput("step_implicit handles backward Euler and Crank-Nicolson");
  const double theta = scheme == SchemeKind::BackwardEuler ? 1.0 : 0.5;
  Vec base = u_n;
  if (theta < 1.0) base -= dt * (1.0 - theta) * spec.op(u_n, dms);
  Vec g = spec.boundary_rows.empty() ? Vec() : spec.boundary_values(t_next);
  const auto& rows = spec.boundary_rows;

  auto resid = [&](const Vec& v) {
    Vec r = v - base + dt * theta * spec.op(v, dms);
    for (size_t k = 0; k < rows.size(); ++k) r[rows[k]] = v[rows[k]] - g[k];
    return r;
  };
  JacobianFn jac;
  if (spec.jacobian) {
    jac = [&](const Vec& v) {
      Mat J = dt * theta * spec.jacobian(v, dms);
      J.diagonal().array() += 1.0;
      for (int i : rows) {
        J.row(i).setZero();
        J(i, i) = 1.0;
      }
      return J;
    };
  }
  Vec start = u_n;
  apply_boundary(start, spec, t_next);
  NllsResult r = nlls_minimize(resid, jac, start, opts);
  if (!r.converged) throw StepFailure("implicit step did not converge", std::sqrt(r.cost));
  return r.x;
}

Trajectory march(const Vec& u0, const NonlinearResidualSpec& spec, const DiffMatrixSet& dms,
                 const TimeScheme& scheme, double t0, const NllsOptions& inner, double blowup) {
  Trajectory tr;
  const int n = scheme.steps;
  tr.times.resize(n + 1);
  tr.states.setConstant(n + 1, u0.size(), std::numeric_limits<double>::quiet_NaN());
  tr.times[0] = t0;
  tr.states.row(0) = u0.transpose();
  Vec u = u0;
  for (int k = 0; k < n; ++k) {
    const double t_next = t0 + (k + 1) * scheme.dt;
    tr.times[k + 1] = t_next;
    try {
      switch (scheme.kind) {
        case SchemeKind::ForwardEuler: u = step_forward_euler(u, spec, dms, scheme.dt, t_next); break;
        case SchemeKind::Imex: u = step_imex(u, spec, dms, scheme.dt, t_next); break;
        default: u = step_implicit(u, spec, dms, scheme.dt, t_next, scheme.kind, inner); break;
      }
    } catch (const Divergence&) {
      tr.diverged = true;
      tr.diverged_step = k + 1;
    }
    if (!tr.diverged && !(u.cwiseAbs().maxCoeff() <= blowup)) {
      tr.diverged = true;
      tr.diverged_step = k + 1;
    }
    if (tr.diverged) {
      for (int j = k + 1; j <= n; ++j) tr.times[j] = t0 + j * scheme.dt;
      break;
    }
    tr.states.row(k + 1) = u.transpose();
  }
  return tr;
}

FullyNonlinearResult solve_fully_nonlinear(const SpaceTimeProblem& problem, const RbfKernel& kernel,
                                           const Vec& init, const NllsOptions& opts) {
  if (init.size() != problem.centers.rows()) throw InvalidInput("init must have one entry per center");
  NllsResult r = nlls_minimize(problem.residual, problem.jacobian, init, opts);
  SolutionField field(problem.centers, kernel, r.x);
  return {std::move(field), std::move(r)};
}

SpaceTimeProblem linear_space_time_problem(const std::vector<ConstraintEquation>& eqs,
                                           const Points& centers, const RbfKernel& kernel) {
  auto sys = std::make_shared<StackedSystem>(stack_system(eqs, centers, kernel));
  SpaceTimeProblem p;
  p.centers = centers;
  p.residual = [sys](const Vec& a) { return Vec(sys->F * a - sys->h); };
  p.jacobian = [sys](const Vec&) { return sys->F; };
  return p;
}

}  // namespace kansa
