#pragma once

#include <cstdint>
#include <utility>

#include "kansa/linalg.hpp"

namespace kansa {

using Fn1 = std::function<double(double)>;

double advection_exact(double x, double t, double beta, const Fn1& u0);

// sum_k c_k sin(2 pi k x), normalized by its max magnitude over a 1024-point grid.
Fn1 advection_ic_from_coeffs(const std::vector<double>& c);
Fn1 advection_random_ic(std::uint64_t seed, int modes = 5);

std::pair<double, double> maxwell_exact(double x, double t, double c, const Fn1& f, const Fn1& g);

// Steady travelling wave between the far-field states um (left) > up (right).
double burgers_exact_steady(double x, double t, double nu, double um, double up);

struct LvParams {
  double alpha = 0.1, beta = 0.02, delta = 0.01, gamma = 0.1;
  Vec as_vec() const;
  static LvParams from_vec(const Vec& v);
};

// Classical RK4 with fixed step at most h, sub-stepped to land on every grid time.
// Returns an n x 2 matrix of (x, y).
Mat lv_reference(const LvParams& p, double x0, double y0, const Vec& t_grid, double h = 0.01);

double lv_invariant(double x, double y, const LvParams& p);

struct CflViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FdmSetup {
  double beta = 0.4;
  double x_lo = 0, x_hi = 1;
  double t_end = 1.0;
  int nx = 100;
  double courant = 0.1;  // target C = |beta| dt / dx
  Fn1 u0;
  bool allow_unstable = false;
};

struct FdmResult {
  Vec x;      // periodic nodes, the upper end excluded
  Vec t;
  Mat u;      // (nt + 1) x nx
  double courant = 0;
  double dx = 0, dt = 0;

  // Linear interpolation in space (periodic) and time.
  double interpolate(double xq, double tq) const;
};

FdmResult fdm_advection(const FdmSetup& setup);

struct Risk {
  double value = 0;
  int excluded = 0;
};

double l2_risk(const Vec& pred, const Vec& truth);
// Points with |truth| below 1e-12 are excluded and counted.
Risk relative_l2_risk(const Vec& pred, const Vec& truth);

}  // namespace kansa
