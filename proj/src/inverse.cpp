#include "kansa/inverse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kansa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Counts evaluations and tracks the best point seen.
struct Tracker {
  const std::function<double(const Vec&)>& f;
  InferResult& res;
  double operator()(const Vec& x) {
    double v = f(x);
    if (std::isnan(v)) v = kInf;
    ++res.n_fev;
    if (res.best_history.empty() || v < res.loss) {
      res.loss = v;
      res.x = x;
    }
    res.best_history.push_back(res.loss);
    return v;
  }
};

double tol_scale(double f) { return 1.0 + (std::isfinite(f) ? std::abs(f) : 0.0); }

}  // namespace

std::string method_name(InferMethod m) {
  switch (m) {
    case InferMethod::Auto: return "auto";
    case InferMethod::NelderMead: return "nelder_mead";
    case InferMethod::CoordinateLineSearch: return "coordinate_line_search";
  }
  return "auto";
}

InferMethod parse_method(const std::string& s) {
  if (s == "auto") return InferMethod::Auto;
  if (s == "nelder_mead" || s == "nm") return InferMethod::NelderMead;
  if (s == "coordinate_line_search" || s == "powell") return InferMethod::CoordinateLineSearch;
  throw std::invalid_argument("unknown inverse method: " + s);
}

double inverse_loss(const InverseProblem& problem, const Vec& params) {
  if (!params.allFinite()) return kInf;
  if (problem.bounds) {
    const auto& b = *problem.bounds;
    for (Eigen::Index i = 0; i < params.size() && i < static_cast<Eigen::Index>(b.size()); ++i)
      if (params[i] < b[i].first || params[i] > b[i].second) return kInf;
  }
  try {
    Vec pred = problem.forward(params);
    if (pred.size() != problem.observations.size()) return kInf;
    double v = (pred - problem.observations).squaredNorm();
    return std::isfinite(v) ? v : kInf;
  } catch (const std::exception&) {
    return kInf;
  }
}

InferResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                        const InferOptions& opts) {
  InferResult res;
  Tracker F{f, res};
  const int n = static_cast<int>(x0.size());
  std::vector<Vec> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  fs[0] = F(x0);
  for (int i = 0; i < n; ++i) {
    xs[i + 1][i] = x0[i] != 0 ? x0[i] * (1 + opts.initial_step) : 0.00025;
    fs[i + 1] = F(xs[i + 1]);
  }
  std::vector<int> order(n + 1);
  while (res.n_fev < opts.max_fev) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<Vec> sx;
    std::vector<double> sf;
    for (int i : order) sx.push_back(xs[i]), sf.push_back(fs[i]);
    xs = std::move(sx);
    fs = std::move(sf);

    double xspread = 0, fspread = 0;
    for (int i = 1; i <= n; ++i) {
      xspread = std::max(xspread, (xs[i] - xs[0]).cwiseAbs().maxCoeff());
      fspread = std::max(fspread, std::abs(fs[i] - fs[0]));
    }
    if (xspread <= opts.xtol && fspread <= opts.ftol * tol_scale(fs[0])) break;

    Vec c = Vec::Zero(n);
    for (int i = 0; i < n; ++i) c += xs[i];
    c /= n;
    Vec xr = 2 * c - xs[n];
    double fr = F(xr);
    if (fr < fs[0]) {
      Vec xe = 3 * c - 2 * xs[n];
      double fe = F(xe);
      if (fe < fr) xs[n] = xe, fs[n] = fe;
      else xs[n] = xr, fs[n] = fr;
      continue;
    }
    if (fr < fs[n - 1]) {
      xs[n] = xr, fs[n] = fr;
      continue;
    }
    bool shrink = false;
    if (fr < fs[n]) {
      Vec xc = c + 0.5 * (xr - c);
      double fc = F(xc);
      if (fc <= fr) xs[n] = xc, fs[n] = fc;
      else shrink = true;
    } else {
      Vec xc = c + 0.5 * (xs[n] - c);
      double fc = F(xc);
      if (fc < fs[n]) xs[n] = xc, fs[n] = fc;
      else shrink = true;
    }
    if (shrink) {
      for (int i = 1; i <= n; ++i) {
        xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
        fs[i] = F(xs[i]);
      }
    }
  }
  return res;
}

namespace {

// Golden-section search on [lo, hi]; returns the best offset and value found.
std::pair<double, double> golden(const std::function<double(double)>& g, double lo, double hi,
                                 double tol, const Tracker& F, const InferOptions& opts) {
  constexpr double invphi = 0.6180339887498949;
  double p = hi - invphi * (hi - lo), q = lo + invphi * (hi - lo);
  double fp = g(p), fq = g(q);
  while (hi - lo > tol && F.res.n_fev < opts.max_fev) {
    if (fp < fq) {
      hi = q, q = p, fq = fp;
      p = hi - invphi * (hi - lo), fp = g(p);
    } else {
      lo = p, p = q, fp = fq;
      q = lo + invphi * (hi - lo), fq = g(q);
    }
  }
  return fp < fq ? std::make_pair(p, fp) : std::make_pair(q, fq);
}

// Minimizes along coordinate i: bracket expansion, then golden section.
void line_search(Tracker& F, Vec& x, double& fx, int i, const InferOptions& opts) {
  constexpr double gold = 1.618033988749895;
  const double step = opts.line_step > 0 ? opts.line_step : std::max(std::abs(x[i]) * opts.initial_step, 1e-4);
  std::function<double(double)> g = [&](double s) {
    Vec y = x;
    y[i] += s;
    return F(y);
  };
  double a = 0, b, fb;
  double best_s = 0, best_f = fx;
  double lo, hi;
  double fplus = g(step);
  double fminus = fplus < fx ? kInf : g(-step);
  if (fplus < fx || fminus < fx) {
    b = fplus < fx ? step : -step;
    fb = std::min(fplus, fminus);
    double c = b + gold * (b - a), fc = g(c);
    int guard = 0;
    while (fc < fb && guard++ < 60 && F.res.n_fev < opts.max_fev) {
      a = b;
      b = c, fb = fc;
      c = b + gold * (b - a);
      fc = g(c);
    }
    best_s = b, best_f = fb;
    lo = std::min(a, c), hi = std::max(a, c);
  } else {
    lo = -step, hi = step;
  }
  const double tol = opts.line_tol * (std::abs(x[i] + best_s) + 1e-12);
  auto [s, fs] = golden(g, lo, hi, tol, F, opts);
  if (fs < best_f) best_s = s, best_f = fs;
  if (best_f < fx) x[i] += best_s, fx = best_f;
}

}  // namespace

InferResult coordinate_line_search(const std::function<double(const Vec&)>& f, const Vec& x0,
                                   const InferOptions& opts) {
  InferResult res;
  Tracker F{f, res};
  Vec x = x0;
  double fx = F(x);
  while (res.n_fev < opts.max_fev) {
    const double before = fx;
    for (Eigen::Index i = 0; i < x.size() && res.n_fev < opts.max_fev; ++i)
      line_search(F, x, fx, static_cast<int>(i), opts);
    if (x.size() == 1 || !(before - fx > opts.ftol * tol_scale(before))) break;
  }
  return res;
}

double gauss_newton_min_curvature(const InverseProblem& problem, const Vec& params, double rel_step) {
  Mat J(problem.observations.size(), params.size());
  for (Eigen::Index j = 0; j < params.size(); ++j) {
    Vec a = params, b = params;
    const double h = rel_step * std::max(std::abs(params[j]), 1e-3);
    a[j] += h;
    b[j] -= h;
    J.col(j) = (problem.forward(a) - problem.forward(b)) / (2 * h);
  }
  if (!J.allFinite()) throw std::runtime_error("non-finite sensitivity");
  Eigen::SelfAdjointEigenSolver<Mat> es(J.transpose() * J);
  const double top = es.eigenvalues().maxCoeff();
  return top > 0 ? std::max(es.eigenvalues().minCoeff(), 0.0) / top : 0.0;
}

InferResult infer(const InverseProblem& problem, const InferOptions& opts) {
  if (!problem.init.allFinite()) throw InvalidInput("initial parameters must be finite");
  auto t0 = std::chrono::steady_clock::now();
  std::function<double(const Vec&)> f = [&](const Vec& p) { return inverse_loss(problem, p); };
  InferMethod m = opts.method;
  if (m == InferMethod::Auto)
    m = problem.init.size() >= 2 ? InferMethod::NelderMead : InferMethod::CoordinateLineSearch;
  InferResult res = m == InferMethod::NelderMead ? nelder_mead(f, problem.init, opts)
                                                 : coordinate_line_search(f, problem.init, opts);
  if (opts.check_identifiability) {
    try {
      res.min_curvature = gauss_newton_min_curvature(problem, res.x, opts.curvature_step);
      res.non_identifiable = !(res.min_curvature >= opts.curvature_floor);
    } catch (const std::exception&) {
      res.non_identifiable = true;
    }
  }
  res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace kansa
