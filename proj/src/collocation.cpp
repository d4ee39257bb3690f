#include "kansa/collocation.hpp"

#include <cmath>

namespace kansa {

double Box::volume() const {
  double v = 1.0;
  for (int c = 0; c < dim(); ++c) v *= hi[c] - lo[c];
  return v;
}

Points CollocationSet::select(GroupKind kind) const {
  Points out(count(kind), dim());
  int r = 0;
  for (int i = 0; i < size(); ++i)
    if (groups[i].kind == kind) out.row(r++) = points.row(i);
  return out;
}

int CollocationSet::count(GroupKind kind) const {
  int n = 0;
  for (const auto& g : groups) n += g.kind == kind;
  return n;
}

Vec linspace(double lo, double hi, int n) {
  if (n == 1) return Vec::Constant(1, lo);
  return Vec::LinSpaced(n, lo, hi);
}

Vec interior_linspace(double lo, double hi, int n) {
  Vec v(n);
  for (int k = 0; k < n; ++k) v[k] = lo + (hi - lo) * (k + 1.0) / (n + 1.0);
  return v;
}

Points tensor_grid(const std::vector<Vec>& axes) {
  int total = 1;
  for (const auto& a : axes) total *= static_cast<int>(a.size());
  const int dim = static_cast<int>(axes.size());
  Points p(total, dim);
  for (int i = 0; i < total; ++i) {
    int rem = i;
    for (int c = dim - 1; c >= 0; --c) {
      int n = static_cast<int>(axes[c].size());
      p(i, c) = axes[c][rem % n];
      rem /= n;
    }
  }
  return p;
}

CollocationSet sample_points(const Box& box, const SampleCounts& counts) {
  const int dim = box.dim();
  if (dim < 2 || box.hi.size() != dim) throw InvalidDomain("box needs space and time axes");
  for (int c = 0; c < dim; ++c)
    if (!(box.hi[c] > box.lo[c])) throw InvalidDomain("degenerate box along axis " + std::to_string(c));
  if (static_cast<int>(counts.grid.size()) != dim) throw InvalidDomain("grid counts do not match box");
  for (int n : counts.grid)
    if (n < 1) throw InvalidDomain("domain grid counts must be positive");
  if (counts.n_initial < 0 || counts.n_boundary < 0) throw InvalidDomain("negative point count");
  if (dim != 2 && (counts.n_initial > 0 || counts.n_boundary > 0))
    throw InvalidDomain("initial/boundary sampling supports one spatial dimension");

  std::vector<Vec> axes;
  for (int c = 0; c < dim; ++c) axes.push_back(interior_linspace(box.lo[c], box.hi[c], counts.grid[c]));
  Points dom = tensor_grid(axes);

  const int nb = counts.n_boundary;
  const int ni = counts.n_initial;
  CollocationSet set;
  set.points.resize(dom.rows() + ni + 2 * nb, dim);
  set.points.topRows(dom.rows()) = dom;
  set.groups.assign(dom.rows(), PointGroup{GroupKind::Domain, -1, 0});
  int r = static_cast<int>(dom.rows());
  if (ni > 0) {
    Vec xs = linspace(box.lo[0], box.hi[0], ni);
    for (int k = 0; k < ni; ++k, ++r) {
      set.points(r, 0) = xs[k];
      set.points(r, 1) = box.lo[1];
      set.groups.push_back({GroupKind::Initial, -1, 0});
    }
  }
  if (nb > 0) {
    Vec ts = linspace(box.lo[1], box.hi[1], nb);
    for (int side = 0; side < 2; ++side) {
      for (int k = 0; k < nb; ++k, ++r) {
        set.points(r, 0) = side == 0 ? box.lo[0] : box.hi[0];
        set.points(r, 1) = ts[k];
        set.groups.push_back({GroupKind::Boundary, 0, side});
      }
    }
  }
  return set;
}

LinearOperatorSpec LinearOperatorSpec::identity(int dim) {
  LinearOperatorSpec op;
  op.add(1.0, DerivIndex::identity(dim));
  return op;
}

LinearOperatorSpec& LinearOperatorSpec::add(double scale, DerivIndex idx) {
  terms.push_back({ScalarFn{}, scale, std::move(idx)});
  return *this;
}

LinearOperatorSpec& LinearOperatorSpec::add(ScalarFn coeff, DerivIndex idx) {
  terms.push_back({std::move(coeff), 1.0, std::move(idx)});
  return *this;
}

Mat kernel_matrix(const Points& centers, const Points& queries, const RbfKernel& kernel) {
  return operator_matrix(LinearOperatorSpec::identity(static_cast<int>(centers.cols())), centers,
                         queries, kernel);
}

Mat operator_matrix(const LinearOperatorSpec& op, const Points& centers, const Points& queries,
                    const RbfKernel& kernel) {
  if (op.terms.empty()) throw InvalidInput("operator needs at least one term");
  if (centers.rows() == 0) throw InvalidInput("no centers");
  const int dim = static_cast<int>(centers.cols());
  if (queries.cols() != dim) throw InvalidInput("query dimension does not match centers");
  std::vector<DerivSlots> slots;
  for (const auto& t : op.terms) {
    if (t.idx.dim() != dim) throw InvalidInput("derivative index dimension mismatch");
    slots.push_back(decode(t.idx));
  }
  const int nt = static_cast<int>(slots.size());
  const Eigen::Index m = queries.rows(), n = centers.rows();
  Mat out(m, n);
  std::vector<double> w(nt), vals(nt), d(dim);
  for (Eigen::Index i = 0; i < m; ++i) {
    Vec q = queries.row(i).transpose();
    for (int k = 0; k < nt; ++k)
      w[k] = op.terms[k].scale * (op.terms[k].coeff ? op.terms[k].coeff(q) : 1.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (int c = 0; c < dim; ++c) d[c] = q[c] - centers(j, c);
      kernel.partials_from_diff(slots, d.data(), dim, vals.data());
      double s = 0;
      for (int k = 0; k < nt; ++k) s += w[k] * vals[k];
      out(i, j) = s;
    }
  }
  return out;
}

StackedSystem stack_system(const std::vector<ConstraintEquation>& eqs, const Points& centers,
                           const RbfKernel& kernel) {
  if (eqs.empty()) throw InvalidInput("no constraint equations");
  StackedSystem sys;
  int rows = 0;
  for (const auto& e : eqs) {
    sys.row_offsets.push_back(rows);
    rows += static_cast<int>(e.points.rows());
  }
  sys.row_offsets.push_back(rows);
  sys.F.resize(rows, centers.rows());
  sys.h.resize(rows);
  for (size_t j = 0; j < eqs.size(); ++j) {
    const auto& e = eqs[j];
    const int r0 = sys.row_offsets[j];
    const int nr = static_cast<int>(e.points.rows());
    if (nr == 0) continue;
    sys.F.middleRows(r0, nr) = operator_matrix(e.op, centers, e.points, kernel);
    for (int i = 0; i < nr; ++i) sys.h[r0 + i] = e.rhs ? e.rhs(e.points.row(i).transpose()) : 0.0;
  }
  return sys;
}

LinearSolve solve_linear(const Mat& F, const Vec& h) {
  LstsqResult r = lstsq(F, h);
  LinearSolve out;
  out.a = std::move(r.x);
  out.info.rank = r.rank;
  out.info.conditioning_warning = r.rank_deficient;
  out.info.cond_estimate = r.cond_estimate;
  return out;
}

SolutionField::SolutionField(Points centers, RbfKernel kernel, Vec coeffs)
    : centers_(std::move(centers)), kernel_(kernel), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != centers_.rows()) throw InvalidInput("coefficient count must match centers");
}

Vec SolutionField::evaluate(const Points& queries) const {
  if (queries.cols() != centers_.cols()) throw InvalidInput("query dimension mismatch");
  return kernel_matrix(centers_, queries, kernel_) * coeffs_;
}

Vec SolutionField::evaluate_partial(const DerivIndex& idx, const Points& queries) const {
  if (queries.cols() != centers_.cols()) throw InvalidInput("query dimension mismatch");
  LinearOperatorSpec op;
  op.add(1.0, idx);
  return operator_matrix(op, centers_, queries, kernel_) * coeffs_;
}

LinearFieldSolve solve_kansa(const std::vector<ConstraintEquation>& eqs, const Points& centers,
                             const RbfKernel& kernel) {
  StackedSystem sys = stack_system(eqs, centers, kernel);
  LinearSolve s = solve_linear(sys.F, sys.h);
  return {SolutionField(centers, kernel, std::move(s.a)), s.info};
}

}  // namespace kansa
