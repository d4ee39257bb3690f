#include "kansa/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "kansa/parallel.hpp"

namespace kansa {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double data_loss(const TuneConfig& cfg, const std::function<Vec(const Points&)>& predict) {
  if (!cfg.data) return 0.0;
  Vec p = predict(cfg.data->points);
  double v = (p - cfg.data->values).squaredNorm();
  return std::isfinite(v) ? v : kInf;
}

double combine(const TuneConfig& cfg, double cond_or_cost, double tv, double dl) {
  double obj = cfg.w1 * cond_or_cost + cfg.w2 * tv + (cfg.data ? cfg.w3 * dl : 0.0);
  return std::isnan(obj) ? kInf : obj;
}
}  // namespace

void TuneConfig::validate() const {
  if (grid.empty()) throw InvalidInput("tuning grid is empty");
  for (double e : grid)
    if (!(e > 0)) throw InvalidInput("tuning candidates must be positive");
  if (w1 < 0 || w2 < 0 || w3 < 0) throw InvalidInput("tuning weights must be non-negative");
  if (data && data->points.rows() != data->values.size())
    throw InvalidInput("tuning data points and values differ in length");
}

std::vector<double> default_grid(double lo, double hi, int per_decade) {
  std::vector<double> g;
  const double a = std::log10(lo), b = std::log10(hi);
  const int n = static_cast<int>(std::lround((b - a) * per_decade));
  for (int k = 0; k <= n; ++k) g.push_back(std::pow(10.0, a + (b - a) * k / n));
  return g;
}

double total_variation(const SolutionField& field, const Points& points, double volume) {
  if (points.rows() == 0) return 0.0;
  Vec sq = Vec::Zero(points.rows());
  for (int c = 0; c < field.dim(); ++c) {
    Vec g = field.evaluate_partial(DerivIndex::d(field.dim(), c), points);
    sq += g.cwiseAbs2();
  }
  return volume / static_cast<double>(points.rows()) * sq.sum();
}

TuneResult finalize_trace(std::vector<TuneEntry> trace) {
  std::stable_sort(trace.begin(), trace.end(),
                   [](const TuneEntry& a, const TuneEntry& b) { return a.epsilon < b.epsilon; });
  TuneResult res;
  int best = -1;
  for (size_t i = 0; i < trace.size(); ++i) {
    trace[i].selected = false;
    if (best < 0 || trace[i].objective < trace[best].objective) best = static_cast<int>(i);
  }
  if (best >= 0) {
    trace[best].selected = true;
    res.best_epsilon = trace[best].epsilon;
  }
  res.trace = std::move(trace);
  return res;
}

TuneResult tune_linear(const std::function<LinearTuneProblem(double)>& builder, const TuneConfig& cfg) {
  cfg.validate();
  std::vector<TuneEntry> trace(cfg.grid.size());
  parallel_for(static_cast<int>(cfg.grid.size()), cfg.workers, [&](int i) {
    TuneEntry& e = trace[i];
    e.epsilon = cfg.grid[i];
    try {
      LinearTuneProblem p = builder(e.epsilon);
      StackedSystem sys = stack_system(p.eqs, p.centers, p.kernel);
      e.cond = condition_number(sys.F);
      LinearSolve s = solve_linear(sys.F, sys.h);
      SolutionField field(p.centers, p.kernel, s.a);
      e.tv = total_variation(field, p.tv_points, p.volume);
      e.data_loss = data_loss(cfg, [&](const Points& q) { return field.evaluate(q); });
      e.objective = combine(cfg, e.cond, e.tv, e.data_loss);
    } catch (const std::exception&) {
      e.objective = kInf;
    }
  });
  return finalize_trace(std::move(trace));
}

TuneResult tune_nonlinear(const std::function<NonlinearTuneOutcome(double)>& builder,
                          const TuneConfig& cfg) {
  cfg.validate();
  std::vector<TuneEntry> trace(cfg.grid.size());
  parallel_for(static_cast<int>(cfg.grid.size()), cfg.workers, [&](int i) {
    TuneEntry& e = trace[i];
    e.epsilon = cfg.grid[i];
    try {
      NonlinearTuneOutcome o = builder(e.epsilon);
      e.cond = o.cond;
      e.tv = o.tv;
      e.data_loss = o.predict ? data_loss(cfg, o.predict) : 0.0;
      e.objective = combine(cfg, o.residual_cost, e.tv, e.data_loss);
    } catch (const std::exception&) {
      e.objective = kInf;
    }
  });
  return finalize_trace(std::move(trace));
}

CoordinateTuneResult tune_coordinate(const std::vector<std::vector<double>>& grids,
                                     const std::vector<double>& start,
                                     const std::function<double(const std::vector<double>&)>& objective,
                                     int max_sweeps) {
  if (grids.size() != start.size()) throw InvalidInput("one grid per field is required");
  CoordinateTuneResult res;
  res.best = start;
  std::map<std::vector<double>, double> seen;
  auto score = [&](const std::vector<double>& eps) {
    auto it = seen.find(eps);
    if (it != seen.end()) return it->second;
    double v;
    try {
      v = objective(eps);
    } catch (const std::exception&) {
      v = kInf;
    }
    if (std::isnan(v)) v = kInf;
    seen.emplace(eps, v);
    res.trace.emplace_back(eps, v);
    return v;
  };
  double best = score(res.best);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool moved = false;
    for (size_t f = 0; f < grids.size(); ++f) {
      std::vector<double> g = grids[f];
      std::sort(g.begin(), g.end());
      for (double cand : g) {
        std::vector<double> trial = res.best;
        trial[f] = cand;
        double v = score(trial);
        if (v < best) {
          best = v;
          res.best = trial;
          moved = true;
        }
      }
    }
    if (!moved) break;
  }
  return res;
}

}  // namespace kansa
