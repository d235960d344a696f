#include <doctest.h>

#include <cmath>

#include "qnls/evolution.hpp"

using namespace qnls;

namespace {
// Closed forms for u = A e^{-r^2/w^2}, v = B e^{-r^2/w^2} in R^d.
double gauss_norm(int d, double w) { return std::pow(M_PI * w * w / 2.0, d / 2.0); }
}  // namespace

TEST_CASE("functionals of a Gaussian pair match closed forms") {
  const double A = 1.3, B = 0.7, w = 1.1, kappa = 0.5;
  for (int d : {4, 5}) {
    auto g = SymmetryGrid::radial(d, 12.0, 1200);
    const FunctionalReport r = evaluate_functionals(gaussian_pair(g, kappa, A, B, w));
    const double n2 = gauss_norm(d, w);
    CHECK(r.mass == doctest::Approx((A * A + 2 * B * B) * n2).epsilon(1e-7));
    CHECK(r.kinetic == doctest::Approx((A * A + kappa * B * B) * d / (w * w) * n2).epsilon(1e-8));
    CHECK(r.potential == doctest::Approx(A * A * B * std::pow(M_PI * w * w / 3.0, d / 2.0)).epsilon(1e-7));
    CHECK(r.energy == doctest::Approx(r.kinetic / 2 - r.potential).epsilon(1e-14));
    CHECK(r.pohozaev_g == doctest::Approx(r.kinetic - d / 2.0 * r.potential).epsilon(1e-14));
  }
}

TEST_CASE("cylindrical and radial grids agree on the same radial state") {
  auto gr = SymmetryGrid::radial(4, 10.0, 800);
  auto gc = SymmetryGrid::cylindrical(4, 10.0, 250, 10.0, 400);
  const auto a = evaluate_functionals(gaussian_pair(gr, 1.0, 1.0, 0.6, 1.2, 0.2));
  const auto b = evaluate_functionals(gaussian_pair(gc, 1.0, 1.0, 0.6, 1.2, 0.2));
  CHECK(b.mass == doctest::Approx(a.mass).epsilon(1e-7));
  CHECK(b.kinetic == doctest::Approx(a.kinetic).epsilon(1e-5));
  CHECK(b.potential == doctest::Approx(a.potential).epsilon(1e-7));
  // One of d directions is x_d, so it carries 1/d of the isotropic kinetic energy.
  CHECK(b.kinetic_z == doctest::Approx(b.kinetic / 4.0).epsilon(1e-4));
}

TEST_CASE("scale_report matches a rescaled state") {
  auto g = SymmetryGrid::radial(5, 16.0, 1600);
  const SystemState s = gaussian_pair(g, 1.0, 1.0, 0.5, 1.0);
  const double lambda = 1.4;
  SystemState t = gaussian_pair(g, 1.0, lambda * lambda * 1.0, lambda * lambda * 0.5, 1.0 / lambda);
  const auto expect = scale_report(evaluate_functionals(s), lambda);
  const auto got = evaluate_functionals(t);
  CHECK(got.mass == doctest::Approx(expect.mass).epsilon(1e-7));
  CHECK(got.kinetic == doctest::Approx(expect.kinetic).epsilon(1e-7));
  CHECK(got.potential == doctest::Approx(expect.potential).epsilon(1e-7));
}

TEST_CASE("report_from fills the derived fields") {
  const auto r = report_from(5, 2.0, 3.0, 1.0);
  CHECK(r.energy == 0.5);
  CHECK(r.pohozaev_g == 0.5);
}

TEST_CASE("uniform-bound root nu solves the defining equation") {
  for (int d : {5, 6}) {
    for (double rho : {0.01, 0.1, 0.5}) {
      const double lam = 1.0 + nu_from_rho(rho, d);
      const double g = d == 5 ? 5 * lam - 4 * std::pow(lam, 1.25) : 3 * lam - 2 * std::pow(lam, 1.5);
      CHECK(lam > 1.0);
      CHECK(g == doctest::Approx(1.0 - rho).epsilon(1e-9));
    }
  }
}
