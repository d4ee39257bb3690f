#include "kansa/coupled.hpp"

#include <cmath>

namespace kansa {

namespace {

Vec concat_coeffs(const std::vector<SolutionField>& fields) {
  Eigen::Index n = 0;
  for (const auto& f : fields) n += f.coeffs().size();
  Vec a(n);
  Eigen::Index off = 0;
  for (const auto& f : fields) {
    a.segment(off, f.coeffs().size()) = f.coeffs();
    off += f.coeffs().size();
  }
  return a;
}

std::vector<SolutionField> split_fields(const CoupledSystemSpec& spec, const Vec& a) {
  const Eigen::Index n = spec.centers.rows();
  std::vector<SolutionField> out;
  for (size_t d = 0; d < spec.fields.size(); ++d)
    out.emplace_back(spec.centers, spec.fields[d].kernel, a.segment(d * n, n));
  return out;
}

}  // namespace

CoupledSystem assemble_coupled(const CoupledSystemSpec& spec) {
  const int nd = static_cast<int>(spec.fields.size());
  if (nd == 0) throw InvalidInput("coupled system without fields");
  if (spec.equations.empty()) throw InvalidInput("coupled system without equations");
  const Eigen::Index n = spec.centers.rows();
  CoupledSystem sys;
  int rows = 0;
  for (const auto& e : spec.equations) {
    if (e.blocks.empty()) throw InvalidInput("coupled equation without blocks");
    if (e.points.cols() != spec.centers.cols()) throw InvalidInput("point dimension mismatch");
    sys.row_offsets.push_back(rows);
    rows += static_cast<int>(e.points.rows());
  }
  sys.row_offsets.push_back(rows);
  sys.F = Mat::Zero(rows, nd * n);
  sys.h.resize(rows);
  for (size_t j = 0; j < spec.equations.size(); ++j) {
    const auto& e = spec.equations[j];
    const int r0 = sys.row_offsets[j];
    const int nr = static_cast<int>(e.points.rows());
    for (const auto& blk : e.blocks) {
      if (blk.field < 0 || blk.field >= nd) throw InvalidInput("block refers to unknown field");
      Mat B = operator_matrix(blk.op, spec.centers, e.points, spec.fields[blk.field].kernel);
      if (blk.weight) {
        for (int i = 0; i < nr; ++i) B.row(i) *= blk.weight(e.points.row(i).transpose());
      }
      sys.F.block(r0, blk.field * n, nr, n) += B;
    }
    for (int i = 0; i < nr; ++i) sys.h[r0 + i] = e.rhs ? e.rhs(e.points.row(i).transpose()) : 0.0;
  }
  return sys;
}

CoupledSolve solve_coupled(const CoupledSystemSpec& spec) {
  CoupledSystem sys = assemble_coupled(spec);
  LinearSolve s = solve_linear(sys.F, sys.h);
  return {split_fields(spec, s.a), s.info};
}

PicardResult solve_coupled_picard(const SpecBuilder& builder, const std::vector<SolutionField>& init,
                                  int max_iter, double tol) {
  if (max_iter < 1) throw InvalidInput("max_iter must be at least 1");
  if (!(tol > 0)) throw InvalidInput("tol must be positive");
  PicardResult res;
  res.fields = init;
  CoupledSystemSpec spec = builder(res.fields);
  CoupledSystem sys = assemble_coupled(spec);
  for (int it = 0; it < max_iter; ++it) {
    LinearSolve s = solve_linear(sys.F, sys.h);
    std::vector<SolutionField> next = split_fields(spec, s.a);
    double change = 0;
    for (size_t d = 0; d < next.size(); ++d) {
      Vec now = next[d].evaluate(spec.centers);
      Vec before = res.fields[d].evaluate(spec.centers);
      change = std::max(change, (now - before).cwiseAbs().maxCoeff());
    }
    if (!std::isfinite(change)) break;
    res.fields = std::move(next);
    res.iterations = it + 1;
    res.last_change = change;
    spec = builder(res.fields);
    sys = assemble_coupled(spec);
    res.residual_history.push_back((sys.F * concat_coeffs(res.fields) - sys.h).norm());
    if (change < tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace kansa
