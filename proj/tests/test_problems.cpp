#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kansa/benchmarks.hpp"
#include "kansa/problems.hpp"

using namespace kansa;
using std::numbers::pi;

namespace {

const Fn1 sin2pi = [](double x) { return std::sin(2 * pi * x); };

}  // namespace

TEST_CASE("advection exact") {
  CHECK(advection_exact(0.3, 0.0, 0.4, sin2pi) == sin2pi(0.3));
  CHECK(advection_exact(0.5, 0.25, 0.4, sin2pi) == doctest::Approx(0.5877853).epsilon(1e-7));
  CHECK(advection_exact(0.7, 9.0, 0.0, sin2pi) == sin2pi(0.7));
}

TEST_CASE("random initial conditions") {
  for (std::uint64_t seed : {1u, 7u, 12345u}) {
    Fn1 u = advection_random_ic(seed);
    double m = 0;
    for (int i = 0; i < 1024; ++i) m = std::max(m, std::abs(u(i / 1023.0)));
    CHECK(m == doctest::Approx(1.0).epsilon(1e-3));
    Fn1 v = advection_random_ic(seed);
    for (int i = 0; i < 100; ++i) CHECK(u(i * 0.0101) == v(i * 0.0101));
  }
  Fn1 s = advection_ic_from_coeffs({1, 0, 0, 0, 0});
  for (double x : {0.1, 0.25, 0.6}) CHECK(s(x) == doctest::Approx(sin2pi(x)).epsilon(1e-5));
  CHECK(advection_random_ic(1)(0.3) != advection_random_ic(2)(0.3));
  CHECK_THROWS_AS(advection_ic_from_coeffs({0, 0}), InvalidInput);
}

TEST_CASE("maxwell d'alembert") {
  MaxwellSetup m;
  Fn1 f = m.f_or_default(), g = m.g_or_default();
  for (double x : {0.0, 0.3, 0.77}) {
    auto [E, B] = maxwell_exact(x, 0.0, 1.0, f, g);
    CHECK(E == doctest::Approx(f(x)));
    CHECK(B == doctest::Approx(g(x)));
    auto [E2, B2] = maxwell_exact(x, 0.4, 1.0, f, f);
    CHECK(E2 == doctest::Approx(f(x - 0.4)));
    CHECK(B2 == doctest::Approx(f(x - 0.4)));
  }
  auto [E, B] = maxwell_exact(0.25, 0.125, 1.0, f, g);
  const double a = 0.125, b = 0.375;
  CHECK(E == doctest::Approx(0.5 * (f(a) + f(b)) + 0.5 * (g(a) - g(b))));
  CHECK(B == doctest::Approx(0.5 * (f(a) - f(b)) + 0.5 * (g(a) + g(b))));
}

TEST_CASE("burgers steady wave") {
  CHECK(burgers_exact_steady(1.0, 2.0, 0.5, 1, 0) == doctest::Approx(0.5));
  CHECK(burgers_exact_steady(-200, 0, 0.5, 1, 0) == doctest::Approx(1.0));
  CHECK(burgers_exact_steady(200, 0, 0.5, 1, 0) == doctest::Approx(0.0));
  CHECK(burgers_exact_steady(1.0, 0, 0.5, 1, 0) == doctest::Approx(0.5 - 0.5 * std::tanh(0.5)).epsilon(1e-12));
  CHECK(burgers_exact_steady(1.0, 0, 0.5, 1, 0) == doctest::Approx(0.2689414).epsilon(1e-7));
}

TEST_CASE("exact solutions satisfy their equations") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-0.5, 1.5), ut(0.0, 1.0), bx(-8, 8), bt(0, 4);
  const double h = 1e-5, hb = 1e-3;
  MaxwellSetup m;
  Fn1 f = m.f_or_default(), g = m.g_or_default();
  double adv = 0, burg = 0, maxw = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = ux(rng), t = ut(rng);
    auto u = [&](double xx, double tt) { return advection_exact(xx, tt, 0.4, sin2pi); };
    adv = std::max(adv, std::abs((u(x, t + h) - u(x, t - h)) / (2 * h) + 0.4 * (u(x + h, t) - u(x - h, t)) / (2 * h)));

    auto E = [&](double xx, double tt) { return maxwell_exact(xx, tt, 1.0, f, g).first; };
    auto B = [&](double xx, double tt) { return maxwell_exact(xx, tt, 1.0, f, g).second; };
    // E_t + B_x = 0 and B_t + E_x = 0 for c = 1
    maxw = std::max(maxw, std::abs((E(x, t + h) - E(x, t - h)) / (2 * h) + (B(x + h, t) - B(x - h, t)) / (2 * h)));
    maxw = std::max(maxw, std::abs((B(x, t + h) - B(x, t - h)) / (2 * h) + (E(x + h, t) - E(x - h, t)) / (2 * h)));

    const double X = bx(rng), T = bt(rng);
    auto w = [&](double xx, double tt) { return burgers_exact_steady(xx, tt, 0.5, 1, 0); };
    const double wt = (w(X, T + hb) - w(X, T - hb)) / (2 * hb);
    const double wx = (w(X + hb, T) - w(X - hb, T)) / (2 * hb);
    const double wxx = (w(X + hb, T) - 2 * w(X, T) + w(X - hb, T)) / (hb * hb);
    burg = std::max(burg, std::abs(wt + w(X, T) * wx - 0.5 * wxx));
  }
  CHECK(adv < 1e-4);
  CHECK(maxw < 1e-4);
  CHECK(burg < 1e-4);
}

TEST_CASE("lotka-volterra oracle") {
  const LvParams p;
  Vec grid = Vec::LinSpaced(201, 0, 200);
  Mat eq = lv_reference(p, 10, 5, grid);
  CHECK((eq.col(0).array() - 10).abs().maxCoeff() < 1e-12);
  CHECK((eq.col(1).array() - 5).abs().maxCoeff() < 1e-12);
  // x* = y* = 1 at equilibrium, where the invariant is stationary
  CHECK(lv_invariant(10, 5, p) == doctest::Approx(-1 - p.gamma / p.alpha));
  const double hd = 1e-5;
  CHECK(std::abs(lv_invariant(10 + hd, 5, p) - lv_invariant(10 - hd, 5, p)) / (2 * hd) < 1e-8);
  CHECK(std::abs(lv_invariant(10, 5 + hd, p) - lv_invariant(10, 5 - hd, p)) / (2 * hd) < 1e-8);

  Mat traj = lv_reference(p, 40, 9, grid);
  const double c0 = lv_invariant(40, 9, p);
  double drift = 0;
  for (int i = 0; i < traj.rows(); ++i) drift = std::max(drift, std::abs(lv_invariant(traj(i, 0), traj(i, 1), p) - c0));
  CHECK(drift <= 1e-6);

  Mat half = lv_reference(p, 40, 9, grid, 0.005);
  CHECK(((traj - half).cwiseAbs().array() / half.cwiseAbs().array()).maxCoeff() < 1e-8);

  CHECK(lv_invariant(4, 2, p) == doctest::Approx(lv_invariant(4, 2, p)));
  LvParams q{0.2, 0.04, 0.02, 0.2};  // same equilibrium scalings, so the same x*, y*
  CHECK(std::abs(lv_invariant(30, 7, p) - lv_invariant(30, 7, q)) < 1e-12);
  CHECK_THROWS_AS(lv_invariant(0, 1, p), std::domain_error);
  CHECK_THROWS_AS(lv_reference(p, 40, 9, Vec::LinSpaced(3, 2, 0)), InvalidInput);
}

TEST_CASE("upwind FDM") {
  FdmSetup s;
  s.u0 = sin2pi;
  s.courant = 1.0;
  s.t_end = 0.025;  // dx = 0.01, one step at C = 1
  FdmResult r = fdm_advection(s);
  REQUIRE(r.t.size() == 2);
  CHECK(r.courant == doctest::Approx(1.0));
  for (int i = 0; i < s.nx; ++i) CHECK(r.u(1, i) == doctest::Approx(r.u(0, (i + s.nx - 1) % s.nx)).epsilon(1e-12));

  // C = 1 over the whole horizon keeps transporting the profile exactly
  s.t_end = 1.0;
  FdmResult full = fdm_advection(s);
  double err = 0;
  for (int j = 0; j < full.t.size(); j += 25)
    for (int i = 0; i < s.nx; ++i) err = std::max(err, std::abs(full.u(j, i) - sin2pi(full.x[i] - 0.4 * full.t[j])));
  CHECK(err < 1e-9);

  FdmSetup m = s;
  m.courant = 0.5;
  m.t_end = 0.5;
  m.beta = 0.4;
  FdmResult pos = fdm_advection(m);
  m.beta = -0.4;
  m.u0 = [](double x) { return std::sin(2 * pi * -x); };
  FdmResult neg = fdm_advection(m);
  const int n = s.nx;
  for (int i = 0; i < n; ++i) CHECK(neg.u.bottomRows(1)(0, (n - i) % n) == doctest::Approx(pos.u.bottomRows(1)(0, i)));

  m.courant = 1.5;
  CHECK_THROWS_AS(fdm_advection(m), CflViolation);
  m.allow_unstable = true;
  CHECK(fdm_advection(m).courant > 1.0);
}

TEST_CASE("FDM error shrinks with resolution") {
  AdvectionSetup s;
  double prev = INFINITY;
  for (int c : {1, 4, 16}) {
    double r = advection_fdm_benchmark(s, c).scores[0].rel_l2;
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("risk metrics") {
  Vec a(4), b(4);
  a << 1, -2, 3, 0.5;
  b << 1.5, -1, 2, 0.5;
  CHECK(l2_risk(a, a) == 0);
  CHECK(relative_l2_risk(a, a).value == 0);
  CHECK(relative_l2_risk(Vec(2 * a), a).value == doctest::Approx(1.0));
  CHECK(l2_risk(Vec(a.array() + 0.3), a) == doctest::Approx(0.3));
  CHECK(l2_risk(a, b) == l2_risk(b, a));
  Vec z(3), zp(3);
  z << 0, 1, 2;
  zp << 5, 1, 4;
  Risk r = relative_l2_risk(zp, z);
  CHECK(r.excluded == 1);
  CHECK(r.value == doctest::Approx(0.5));
  CHECK_THROWS_AS(l2_risk(a, z), InvalidInput);
  CHECK_THROWS_AS(relative_l2_risk(a, z), InvalidInput);
}

TEST_CASE("resolution multipliers") {
  CHECK(per_axis_factor(16, 2) == 4);
  CHECK(per_axis_factor(100, 2) == 10);
  CHECK(per_axis_factor(4, 1) == 4);
  CHECK_THROWS(per_axis_factor(8, 2));
  CHECK_THROWS(per_axis_factor(0, 2));
}

TEST_CASE("default setups") {
  AdvectionSetup a;
  CHECK(a.beta == 0.4);
  CHECK(a.initial()(0.25) == doctest::Approx(1.0));
  LvSetup l;
  CHECK(l.params.as_vec() == Vec{{0.1, 0.02, 0.01, 0.1}});
  CHECK(l.x0 == 40);
  CHECK(l.y0 == 9);
  CHECK(l.T == 200);
  BurgersSetup b;
  CHECK(b.nu == 0.5);
  CHECK(b.boundary(b.x_lo, 0, b.nu) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(b.boundary(b.x_hi, 0, b.nu) == doctest::Approx(0.0).scale(1).epsilon(1e-4));
  MaxwellSetup m;
  CHECK(m.c == 1.0);
}
