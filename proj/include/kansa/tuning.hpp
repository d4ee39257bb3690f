#pragma once

#include <limits>
#include <optional>

#include "kansa/collocation.hpp"

namespace kansa {

struct TuneData {
  Points points;
  Vec values;
};

struct TuneConfig {
  std::vector<double> grid;
  double w1 = 1e-12;
  double w2 = 1.0;
  double w3 = 1.0;
  std::optional<TuneData> data;  // the w3 term is active only when present
  int workers = 1;

  void validate() const;
};

// 16 log-spaced candidates per decade over [1e-2, 1e2].
std::vector<double> default_grid(double lo = 1e-2, double hi = 1e2, int per_decade = 16);

struct TuneEntry {
  double epsilon = 0;
  double cond = 0;
  double tv = 0;
  double data_loss = 0;
  double objective = 0;
  bool selected = false;
};

struct TuneResult {
  double best_epsilon = 0;
  std::vector<TuneEntry> trace;  // sorted by epsilon
};

// (volume / N) sum_i |grad u(x_i)|^2 over all coordinates, time included.
double total_variation(const SolutionField& field, const Points& points, double volume);

struct LinearTuneProblem {
  std::vector<ConstraintEquation> eqs;
  Points centers;
  RbfKernel kernel;
  Points tv_points;
  double volume = 1.0;
};

TuneResult tune_linear(const std::function<LinearTuneProblem(double)>& builder, const TuneConfig& cfg);

struct NonlinearTuneOutcome {
  double residual_cost = 0;
  double tv = 0;
  double cond = std::numeric_limits<double>::quiet_NaN();
  std::function<Vec(const Points&)> predict;
};

TuneResult tune_nonlinear(const std::function<NonlinearTuneOutcome(double)>& builder,
                          const TuneConfig& cfg);

struct CoordinateTuneResult {
  std::vector<double> best;
  std::vector<std::pair<std::vector<double>, double>> trace;
};

// Sweeps one field's grid at a time while the others hold their current best.
CoordinateTuneResult tune_coordinate(const std::vector<std::vector<double>>& grids,
                                     const std::vector<double>& start,
                                     const std::function<double(const std::vector<double>&)>& objective,
                                     int max_sweeps = 3);

// Shared scoring: marks the argmin (ties toward smaller epsilon) and sorts.
TuneResult finalize_trace(std::vector<TuneEntry> trace);

}  // namespace kansa
