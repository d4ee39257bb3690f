#include "kansa/problems.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace kansa {

using std::numbers::pi;

double advection_exact(double x, double t, double beta, const Fn1& u0) { return u0(x - beta * t); }

Fn1 advection_ic_from_coeffs(const std::vector<double>& c) {
  auto raw = [c](double x) {
    double s = 0;
    for (size_t k = 0; k < c.size(); ++k) s += c[k] * std::sin(2 * pi * (k + 1.0) * x);
    return s;
  };
  double m = 0;
  for (int i = 0; i < 1024; ++i) m = std::max(m, std::abs(raw(i / 1023.0)));
  if (m == 0) throw InvalidInput("initial condition is identically zero");
  return [raw, m](double x) { return raw(x) / m; };
}

Fn1 advection_random_ic(std::uint64_t seed, int modes) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> c(modes);
  for (auto& v : c) v = n01(rng);
  return advection_ic_from_coeffs(c);
}

std::pair<double, double> maxwell_exact(double x, double t, double c, const Fn1& f, const Fn1& g) {
  const double a = x - c * t, b = x + c * t;
  double E = 0.5 * (f(a) + f(b)) + 0.5 * (g(a) - g(b));
  double B = 0.5 * (f(a) - f(b)) + 0.5 * (g(a) + g(b));
  return {E, B};
}

double burgers_exact_steady(double x, double t, double nu, double um, double up) {
  const double c = 0.5 * (um + up);
  const double du = 0.5 * (um - up);
  return c - du * std::tanh(du * (x - c * t) / (2 * nu));
}

Vec LvParams::as_vec() const { return Vec{{alpha, beta, delta, gamma}}; }

LvParams LvParams::from_vec(const Vec& v) {
  if (v.size() != 4) throw InvalidInput("Lotka-Volterra needs four parameters");
  return {v[0], v[1], v[2], v[3]};
}

Mat lv_reference(const LvParams& p, double x0, double y0, const Vec& t_grid, double h) {
  auto f = [&](const Eigen::Vector2d& z) {
    return Eigen::Vector2d(p.alpha * z[0] - p.beta * z[0] * z[1], p.delta * z[0] * z[1] - p.gamma * z[1]);
  };
  Mat out(t_grid.size(), 2);
  Eigen::Vector2d z(x0, y0);
  double t = 0;
  for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
    const double target = t_grid[i];
    if (i > 0 && target < t_grid[i - 1]) throw InvalidInput("time grid must be ascending");
    const int steps = static_cast<int>(std::ceil((target - t) / h - 1e-12));
    if (steps > 0) {
      const double hh = (target - t) / steps;
      for (int s = 0; s < steps; ++s) {
        Eigen::Vector2d k1 = f(z), k2 = f(z + hh / 2 * k1), k3 = f(z + hh / 2 * k2), k4 = f(z + hh * k3);
        z += hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      }
      if (!z.allFinite()) throw std::runtime_error("RK4 integration produced non-finite state");
    }
    t = target;
    out.row(i) = z.transpose();
  }
  return out;
}

double lv_invariant(double x, double y, const LvParams& p) {
  if (!(x > 0 && y > 0)) throw std::domain_error("populations must be positive");
  const double xs = p.delta / p.gamma * x;
  const double ys = p.beta / p.alpha * y;
  return std::log(ys) - ys + p.gamma / p.alpha * (std::log(xs) - xs);
}

FdmResult fdm_advection(const FdmSetup& s) {
  if (s.nx < 2) throw InvalidInput("FDM needs at least two nodes");
  if (!s.u0) throw InvalidInput("FDM needs an initial condition");
  FdmResult r;
  const double L = s.x_hi - s.x_lo;
  r.dx = L / s.nx;
  const double speed = std::abs(s.beta);
  int nt = 1;
  if (speed > 0) {
    double dt_target = s.courant * r.dx / speed;
    nt = static_cast<int>(std::ceil(s.t_end / dt_target - 1e-9));
  }
  r.dt = s.t_end / nt;
  r.courant = speed * r.dt / r.dx;
  if (r.courant > 1.0 + 1e-12 && !s.allow_unstable)
    throw CflViolation("CFL number " + std::to_string(r.courant) + " exceeds 1");
  r.x.resize(s.nx);
  for (int i = 0; i < s.nx; ++i) r.x[i] = s.x_lo + i * r.dx;
  r.t.resize(nt + 1);
  for (int j = 0; j <= nt; ++j) r.t[j] = j * r.dt;
  r.u.resize(nt + 1, s.nx);
  for (int i = 0; i < s.nx; ++i) r.u(0, i) = s.u0(r.x[i]);
  const double nu = s.beta * r.dt / r.dx;
  for (int j = 0; j < nt; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      const double ui = r.u(j, i);
      if (s.beta > 0) r.u(j + 1, i) = ui - nu * (ui - r.u(j, (i + s.nx - 1) % s.nx));
      else r.u(j + 1, i) = ui - nu * (r.u(j, (i + 1) % s.nx) - ui);
    }
  }
  return r;
}

double FdmResult::interpolate(double xq, double tq) const {
  const int nx = static_cast<int>(x.size());
  const int nt = static_cast<int>(t.size()) - 1;
  double jf = tq / dt;
  int j0 = std::clamp(static_cast<int>(std::floor(jf)), 0, std::max(nt - 1, 0));
  double wt = nt > 0 ? std::clamp(jf - j0, 0.0, 1.0) : 0.0;
  const double L = dx * nx;
  double xf = std::fmod(xq - x[0], L);
  if (xf < 0) xf += L;
  double sf = xf / dx;
  int i0 = std::min(static_cast<int>(std::floor(sf)), nx - 1);
  double wx = sf - i0;
  int i1 = (i0 + 1) % nx;
  auto at = [&](int j) { return (1 - wx) * u(j, i0) + wx * u(j, i1); };
  if (nt == 0) return at(0);
  return (1 - wt) * at(j0) + wt * at(j0 + 1);
}

double l2_risk(const Vec& pred, const Vec& truth) {
  if (pred.size() != truth.size()) throw InvalidInput("risk: length mismatch");
  if (pred.size() == 0) return 0;
  return (pred - truth).cwiseAbs().mean();
}

Risk relative_l2_risk(const Vec& pred, const Vec& truth) {
  if (pred.size() != truth.size()) throw InvalidInput("risk: length mismatch");
  Risk r;
  double sum = 0;
  int n = 0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    if (std::abs(truth[i]) < 1e-12) {
      ++r.excluded;
      continue;
    }
    sum += std::abs(pred[i] - truth[i]) / std::abs(truth[i]);
    ++n;
  }
  r.value = n > 0 ? sum / n : 0.0;
  return r;
}

}  // namespace kansa
