#pragma once

#include <string>

#include "kansa/collocation.hpp"

namespace kansa {

struct FieldSpec {
  std::string name;
  RbfKernel kernel;
};

struct CoupledBlock {
  int field = 0;
  ScalarFn weight;  // empty means constant 1
  LinearOperatorSpec op;
};

struct CoupledEquation {
  std::vector<CoupledBlock> blocks;
  ScalarFn rhs;
  Points points;
};

struct CoupledSystemSpec {
  std::vector<FieldSpec> fields;
  std::vector<CoupledEquation> equations;
  Points centers;
};

struct CoupledSystem {
  Mat F;
  Vec h;
  std::vector<int> row_offsets;
};

CoupledSystem assemble_coupled(const CoupledSystemSpec& spec);

struct CoupledSolve {
  std::vector<SolutionField> fields;
  LinearSolveInfo info;
};

CoupledSolve solve_coupled(const CoupledSystemSpec& spec);

using SpecBuilder = std::function<CoupledSystemSpec(const std::vector<SolutionField>&)>;

struct PicardResult {
  std::vector<SolutionField> fields;
  bool converged = false;
  int iterations = 0;
  double last_change = 0;
  // ||F(u_m) a_m - h(u_m)|| after each iteration m.
  std::vector<double> residual_history;
};

PicardResult solve_coupled_picard(const SpecBuilder& builder, const std::vector<SolutionField>& init,
                                  int max_iter, double tol);

}  // namespace kansa
