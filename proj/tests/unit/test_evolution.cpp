#include <doctest.h>

#include <cmath>

#include "qnls/evolution.hpp"

using namespace qnls;

namespace {
double distance(const SystemState& a, const SystemState& b) {
  ComplexField du = a.u, dv = a.v;
  for (std::size_t j = 0; j < du.size(); ++j) {
    du[j] -= b.u[j];
    dv[j] -= b.v[j];
  }
  return std::sqrt(norm2(*a.grid, du) + 2.0 * norm2(*a.grid, dv));
}
SystemState run_fixed(SystemState s, double dt, double T) {
  Integrator in(s.grid, s.kappa);
  const long n = std::lround(T / dt);
  for (long i = 0; i < n; ++i) in.step(s, dt);
  return s;
}
}  // namespace

TEST_CASE("nonlinear substep preserves the local density") {
  auto g = SymmetryGrid::radial(4, 6.0, 64);
  SystemState s = gaussian_pair(g, 1.0, 4.0, -2.0, 1.0, 0.4);
  std::vector<double> before(g->size());
  for (std::size_t j = 0; j < g->size(); ++j) before[j] = std::norm(s.u[j]) + 2.0 * std::norm(s.v[j]);
  nonlinear_substep(s, 0.05);
  for (std::size_t j = 0; j < g->size(); ++j) CHECK(std::norm(s.u[j]) + 2.0 * std::norm(s.v[j]) == doctest::Approx(before[j]).epsilon(1e-13));
}

TEST_CASE("linear flow is unitary on both geometries") {
  for (bool cyl : {false, true}) {
    auto g = cyl ? SymmetryGrid::cylindrical(5, 8.0, 64, 6.0, 64) : SymmetryGrid::radial(4, 10.0, 256);
    IntegratorConfig cfg;
    cfg.dt0 = 0.01;
    cfg.t_end = 0.3;
    cfg.adapt = false;
    cfg.nonlinear = false;
    const auto rec = evolve(gaussian_pair(g, 0.5, 1.0, 1.0, 1.0, 0.1), cfg);
    CHECK(rec.termination == Termination::reached_horizon);
    CHECK(rec.samples.back().mass_drift < 1e-12);
    // P is not invariant under the linear flow, but T is.
    CHECK(rec.samples.back().f.kinetic == doctest::Approx(rec.initial.kinetic).epsilon(1e-12));
  }
}

TEST_CASE("Strang splitting is second order") {
  auto g = SymmetryGrid::radial(4, 12.0, 192);
  const auto s = gaussian_pair(g, 1.0, 1.5, 0.8, 1.0, 0.1);
  const double T = 0.4;
  const auto ref = run_fixed(s, T / 1280, T);
  const double e1 = distance(run_fixed(s, 0.02, T), ref);
  const double e2 = distance(run_fixed(s, 0.01, T), ref);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("standing wave keeps its functionals") {
  auto g = SymmetryGrid::radial(4, 16.0, 256);
  const auto gs = solve_ground_state(4, 1.0, g);
  IntegratorConfig cfg;
  cfg.dt0 = 1e-3;
  cfg.t_end = 0.5;
  cfg.adapt = false;
  cfg.monitor_stride = 100;
  const auto rec = evolve(gs.standing_wave(), cfg);
  for (const auto& x : rec.samples) {
    CHECK(x.mass_drift < 1e-10);
    CHECK(x.energy_drift < 1e-5);
  }
  // Phase after t = 0.5 is e^{i t} on u.
  const cplx ratio = rec.final_state.u[0] / gs.phi[0];
  CHECK(std::arg(ratio) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("adaptive step is dyadic and respects the kinetic rule") {
  auto g = SymmetryGrid::radial(4, 12.0, 256);
  IntegratorConfig cfg;
  cfg.dt0 = 0.01;
  cfg.c_adapt = 0.1;
  cfg.t_end = 0.05;
  cfg.monitor_stride = 1;
  const auto rec = evolve(gaussian_pair(g, 1.0, 3.0, 1.5), cfg);
  for (const auto& x : rec.samples) {
    if (x.step == 0) continue;
    const double k = std::log2(cfg.dt0 / x.dt);
    CHECK(k == doctest::Approx(std::round(k)).epsilon(1e-12));
    CHECK(x.dt <= cfg.dt0);
  }
  CHECK(rec.t_final == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("ODE projection reproduces the closed-form blow-up time") {
  // M = -1/(A (1 - t)) on [0, 0.99]: z = (1/A^2)(1/(1-t) - 1), so t* = t1 + 1/(A^2 z(t1)) = 0.99 + 0.01/0.99.
  const double A = 2.0;
  std::vector<double> t, m;
  for (int i = 0; i <= 20000; ++i) {
    const double s = 0.99 * i / 20000.0;
    t.push_back(s);
    m.push_back(-1.0 / (A * (1.0 - s)));
  }
  const auto o = ode_blowup_projection(t, m, A);
  CHECK(o.z_series.back() == doctest::Approx((1.0 / (A * A)) * (1.0 / 0.01 - 1.0)).epsilon(1e-2));
  CHECK(o.projected_t_star == doctest::Approx(0.99 + 0.01 / 0.99).epsilon(1e-2));
}

TEST_CASE("grow-up fit recovers a power law") {
  std::vector<double> t, T;
  for (int i = 0; i <= 40; ++i) {
    t.push_back(std::pow(10.0, -2.0 + 3.0 * i / 40.0));
    T.push_back(3.0 * t.back() * t.back());
  }
  const auto f = growup_rate_fit(t, T);
  CHECK(f.exponent_fit == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.c_fit == doctest::Approx(3.0).epsilon(1e-12));
  std::vector<double> shortt = {1.0, 2.0}, shortT = {1.0, 4.0};
  CHECK_THROWS_AS(growup_rate_fit(shortt, shortT), Error);
}

TEST_CASE("monotone check flags samples above the affine majorant") {
  TrajectoryRecord rec;
  for (int i = 0; i < 5; ++i) {
    TrajectorySample x;
    x.t = 0.1 * i;
    VirialReport r;
    r.m_phi = 1.0 - 10.0 * x.t;
    x.virial.push_back(r);
    rec.samples.push_back(x);
  }
  CHECK(monotone_bound_check(rec, -1.0).holds);  // majorant 1 - 8t
  rec.samples[3].virial[0].m_phi = 1.0;
  const auto bad = monotone_bound_check(rec, -1.0);
  CHECK_FALSE(bad.holds);
  CHECK(bad.violations.size() == 1);
  CHECK_FALSE(monotone_bound_check(rec, 1.0).applicable);
}

TEST_CASE("initial-data library") {
  auto g = SymmetryGrid::cylindrical(4, 10.0, 100, 6.0, 60);
  SystemState s = shell_pair(g, 1.0, 4.0, 0.5, 50.0);
  CHECK(evaluate_functionals(s).mass == doctest::Approx(50.0).epsilon(1e-12));
  normalize_mass(s, 10.0);
  CHECK(evaluate_functionals(s).mass == doctest::Approx(10.0).epsilon(1e-12));
  CHECK_THROWS_AS(gaussian_pair(g, 1.0, 1.0, 1.0, -1.0), Error);
}
