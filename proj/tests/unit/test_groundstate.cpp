#include <doctest.h>

#include <cmath>

#include "qnls/groundstate.hpp"

using namespace qnls;

namespace {
const GroundStatePair& gs4() {
  static const GroundStatePair gs = solve_ground_state(4, 1.0, SymmetryGrid::radial(4, 20.0, 1024));
  return gs;
}
const GroundStatePair& gs5() {
  static const GroundStatePair gs = solve_ground_state(5, 0.5, SymmetryGrid::radial(5, 20.0, 1024));
  return gs;
}
}  // namespace

TEST_CASE("ground state d=4 satisfies the Pohozaev relations") {
  const auto& gs = gs4();
  CHECK(gs.residual_norm < 1e-9);
  CHECK(positive_and_decreasing(gs.phi));
  CHECK(positive_and_decreasing(gs.psi));
  // d = 4: M = T/2 = P
  CHECK(gs.mass == doctest::Approx(gs.kinetic / 2.0).epsilon(1e-5));
  CHECK(gs.mass == doctest::Approx(gs.potential).epsilon(1e-5));
}

TEST_CASE("ground state d=5 satisfies the Pohozaev relations") {
  const auto& gs = gs5();
  CHECK(gs.residual_norm < 1e-9);
  // d = 5: M = T/5 = P/2
  CHECK(gs.mass == doctest::Approx(gs.kinetic / 5.0).epsilon(1e-5));
  CHECK(gs.mass == doctest::Approx(gs.potential / 2.0).epsilon(1e-5));
}

TEST_CASE("frozen ground-state functionals") {
  // Values of this solver on a 1024-cell grid, r_max = 20; the shooting oracle agrees to 1e-3.
  CHECK(gs4().mass == doctest::Approx(396.996234770656).epsilon(1e-6));
  CHECK(gs4().kinetic == doctest::Approx(793.9921036432546).epsilon(1e-6));
  CHECK(gs5().mass == doctest::Approx(366.50719686987543).epsilon(1e-6));
  CHECK(gs5().kinetic == doctest::Approx(1832.5225716760199).epsilon(1e-6));
}

TEST_CASE("shooting oracle agrees with the iterative solver") {
  const ShootingResult sh = shooting_oracle(4, 1.0);
  CHECK(sh.monotone);
  CHECK(sh.mass == doctest::Approx(gs4().mass).epsilon(1e-3));
  CHECK(sh.kinetic == doctest::Approx(gs4().kinetic).epsilon(1e-3));
  CHECK(sh.potential == doctest::Approx(gs4().potential).epsilon(1e-3));
}

TEST_CASE("sharp constants from the ground states") {
  const auto t4 = threshold_constants(gs4());
  CHECK(t4.c_gn == doctest::Approx(0.5 / std::sqrt(gs4().mass)).epsilon(1e-4));
  const auto t5 = threshold_constants(gs5());
  CHECK(t5.c_gn == doctest::Approx(0.4 * std::pow(gs5().mass * gs5().kinetic, -0.25)).epsilon(1e-4));
  CHECK(t5.e_m == doctest::Approx(t5.t_m / 10.0).epsilon(1e-5));
  CHECK(t5.e_m == doctest::Approx(t5.p_m / 4.0).epsilon(1e-5));
}

TEST_CASE("explicit d=6 static pair") {
  // The discrete residual is truncation error of the origin closure; it must shrink with h.
  const double r1 = explicit_6d_residual(1.0, *SymmetryGrid::radial(6, 20.0, 2048));
  const double r2 = explicit_6d_residual(1.0, *SymmetryGrid::radial(6, 20.0, 8192));
  CHECK(r1 / r2 > 16.0);
  for (double kappa : {0.5, 1.0, 2.0}) {
    auto g = SymmetryGrid::radial(6, 20.0, 32768);
    const auto gs = explicit_static_6d(kappa, g);
    CHECK(explicit_6d_residual(kappa, *g) < 1e-6);
    CHECK(gs.energy == doctest::Approx(gs.kinetic / 6.0).epsilon(1e-4));
    const auto th = threshold_constants(gs);
    CHECK(th.c_sob * std::sqrt(gs.kinetic) == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  }
}

TEST_CASE("radial rescaling and interpolation") {
  auto g = SymmetryGrid::radial(4, 10.0, 400);
  const RealField f = sample(*g, [](double r, double) { return std::exp(-r * r); });
  const RealField h = rescale_radial(*g, f, 1.5);
  for (int i : {0, 50, 120}) {
    const double r = g->rho_node(i);
    CHECK(h[static_cast<std::size_t>(i)] == doctest::Approx(2.25 * std::exp(-2.25 * r * r)).epsilon(1e-6));
  }
  CHECK(interpolate_radial(*g, f, 0.0) == doctest::Approx(1.0).epsilon(1e-7));
}
