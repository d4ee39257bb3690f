#pragma once

#include <optional>
#include <string>

#include "kansa/linalg.hpp"

namespace kansa {

struct InverseProblem {
  std::function<Vec(const Vec&)> forward;  // predictions at the observation points
  Vec observations;
  Vec init;
  std::optional<std::vector<std::pair<double, double>>> bounds;
};

enum class InferMethod { Auto, NelderMead, CoordinateLineSearch };
std::string method_name(InferMethod m);
InferMethod parse_method(const std::string& s);

struct InferOptions {
  InferMethod method = InferMethod::Auto;
  int max_fev = 2000;
  double xtol = 1e-8;
  double ftol = 1e-12;
  double line_tol = 1e-6;        // relative tolerance of each golden-section search
  double initial_step = 0.05;    // relative simplex / bracket step
  double line_step = 0;          // absolute first bracket step; 0 uses initial_step
  bool check_identifiability = false;
  double curvature_floor = 1e-12;  // on the eigenvalue ratio of J^T J
  double curvature_step = 1e-2;    // relative central-difference step for J
};

struct InferResult {
  Vec x;
  double loss = 0;
  int n_fev = 0;
  std::vector<double> best_history;  // best loss after every evaluation
  double wall_time_s = 0;
  bool non_identifiable = false;
  double min_curvature = std::numeric_limits<double>::quiet_NaN();
};

// Sum of squared discrepancies; failures and out-of-bounds points score +inf.
double inverse_loss(const InverseProblem& problem, const Vec& params);

InferResult infer(const InverseProblem& problem, const InferOptions& opts = {});

// Direct minimizers over a scalar objective, shared by infer.
InferResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                        const InferOptions& opts);
InferResult coordinate_line_search(const std::function<double(const Vec&)>& f, const Vec& x0,
                                   const InferOptions& opts);

// Smallest over largest eigenvalue of the Gauss-Newton Hessian J^T J of the forward map at params;
// 0 when J vanishes.
double gauss_newton_min_curvature(const InverseProblem& problem, const Vec& params, double rel_step = 1e-2);

}  // namespace kansa
