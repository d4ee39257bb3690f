#pragma once

#include <functional>

#include "kansa/kernels.hpp"
#include "kansa/linalg.hpp"

namespace kansa {

using ScalarFn = std::function<double(const Vec&)>;

// Axis-aligned spatio-temporal box; the last coordinate is time.
struct Box {
  Vec lo;
  Vec hi;
  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
};

enum class GroupKind { Domain, Initial, Boundary };

struct PointGroup {
  GroupKind kind = GroupKind::Domain;
  int coord = -1;  // spatial coordinate of a boundary face
  int side = 0;    // 0 = lower face, 1 = upper face
};

struct CollocationSet {
  Points points;
  std::vector<PointGroup> groups;

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  Points select(GroupKind kind) const;
  int count(GroupKind kind) const;
};

struct SampleCounts {
  std::vector<int> grid;  // domain points per coordinate, time last
  int n_initial = 0;
  int n_boundary = 0;  // per spatial face
};

struct InvalidDomain : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// n points uniformly spaced over [lo, hi] including both ends.
Vec linspace(double lo, double hi, int n);
// n interior points k/(n+1) of [lo, hi].
Vec interior_linspace(double lo, double hi, int n);
// Tensor grid over the given axes, first axis varying slowest.
Points tensor_grid(const std::vector<Vec>& axes);

CollocationSet sample_points(const Box& box, const SampleCounts& counts);

struct OperatorTerm {
  ScalarFn coeff;  // empty means constant 1
  double scale = 1.0;
  DerivIndex idx;
};

struct LinearOperatorSpec {
  std::vector<OperatorTerm> terms;

  static LinearOperatorSpec identity(int dim);
  LinearOperatorSpec& add(double scale, DerivIndex idx);
  LinearOperatorSpec& add(ScalarFn coeff, DerivIndex idx);
};

struct ConstraintEquation {
  LinearOperatorSpec op;
  ScalarFn rhs;
  Points points;
};

Mat kernel_matrix(const Points& centers, const Points& queries, const RbfKernel& kernel);
Mat operator_matrix(const LinearOperatorSpec& op, const Points& centers, const Points& queries,
                    const RbfKernel& kernel);

struct StackedSystem {
  Mat F;
  Vec h;
  std::vector<int> row_offsets;  // start row of each equation block, plus the total
};

StackedSystem stack_system(const std::vector<ConstraintEquation>& eqs, const Points& centers,
                           const RbfKernel& kernel);

struct LinearSolveInfo {
  int rank = 0;
  bool conditioning_warning = false;
  double cond_estimate = 0;
};

struct LinearSolve {
  Vec a;
  LinearSolveInfo info;
};

LinearSolve solve_linear(const Mat& F, const Vec& h);

class SolutionField {
 public:
  SolutionField() = default;
  SolutionField(Points centers, RbfKernel kernel, Vec coeffs);

  const Points& centers() const { return centers_; }
  const RbfKernel& kernel() const { return kernel_; }
  const Vec& coeffs() const { return coeffs_; }
  int dim() const { return static_cast<int>(centers_.cols()); }

  Vec evaluate(const Points& queries) const;
  Vec evaluate_partial(const DerivIndex& idx, const Points& queries) const;

 private:
  Points centers_;
  RbfKernel kernel_;
  Vec coeffs_;
};

struct LinearFieldSolve {
  SolutionField field;
  LinearSolveInfo info;
};

// Assemble, solve and wrap: the full linear Kansa pipeline.
LinearFieldSolve solve_kansa(const std::vector<ConstraintEquation>& eqs, const Points& centers,
                             const RbfKernel& kernel);

}  // namespace kansa
