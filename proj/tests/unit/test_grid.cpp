#include <doctest.h>

#include <cmath>

#include "qnls/grid.hpp"

using namespace qnls;

TEST_CASE("sphere areas and ball volumes") {
  CHECK(sphere_area(1) == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
  CHECK(sphere_area(2) == doctest::Approx(4.0 * M_PI).epsilon(1e-14));
  CHECK(sphere_area(3) == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-14));
  CHECK(ball_volume(4) == doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-14));
  CHECK(ball_volume(6) == doctest::Approx(std::pow(M_PI, 3) / 6.0).epsilon(1e-14));
}

TEST_CASE("Gaussian integrates to pi^(d/2) on both geometries") {
  for (int d : {4, 5, 6}) {
    auto gr = SymmetryGrid::radial(d, 10.0, 800);
    const RealField f = sample(*gr, [](double r, double) { return std::exp(-r * r); });
    CHECK(integrate(*gr, f) == doctest::Approx(std::pow(M_PI, d / 2.0)).epsilon(1e-8));

    auto gc = SymmetryGrid::cylindrical(d, 8.0, 320, 8.0, 160);
    const RealField fc = sample(*gc, [](double rho, double z) { return std::exp(-rho * rho - z * z); });
    CHECK(integrate(*gc, fc) == doctest::Approx(std::pow(M_PI, d / 2.0)).epsilon(1e-7));
  }
}

TEST_CASE("Laplacian of a Gaussian: fourth order in the interior, second order at the origin") {
  // Delta e^{-r^2} = (4 r^2 - 2d) e^{-r^2}
  auto err = [](int n, double r_lo, double r_hi) {
    auto g = SymmetryGrid::radial(4, 8.0, n);
    const RealField f = sample(*g, [](double r, double) { return std::exp(-r * r); });
    const RealField lf = apply_laplacian(*g, f);
    double e = 0.0;
    for (int i = 0; i < g->n_rho(); ++i) {
      const double r = g->rho_node(i);
      if (r < r_lo) continue;
      if (r > r_hi) break;
      e = std::max(e, std::abs(lf[static_cast<std::size_t>(i)] - (4.0 * r * r - 8.0) * std::exp(-r * r)));
    }
    return e;
  };
  const double e1 = err(200, 1.0, 6.0), e2 = err(400, 1.0, 6.0);
  CHECK(e2 < 1e-6);
  CHECK(std::log2(e1 / e2) > 3.5);
  const double o1 = err(200, 0.0, 1.0), o2 = err(400, 0.0, 1.0);
  CHECK(std::log2(o1 / o2) > 1.8);
}

TEST_CASE("Laplacian is symmetric in the quadrature inner product") {
  for (bool cyl : {false, true}) {
    auto g = cyl ? SymmetryGrid::cylindrical(5, 6.0, 48, 5.0, 40) : SymmetryGrid::radial(5, 6.0, 96);
    const RealField f = sample(*g, [](double r, double z) { return std::exp(-0.7 * r * r - 0.3 * z * z) * (1.0 + 0.2 * r); });
    const RealField h = sample(*g, [](double r, double z) { return std::exp(-(r - 1.0) * (r - 1.0) - z * z); });
    const double a = inner(*g, f, apply_laplacian(*g, h));
    const double b = inner(*g, apply_laplacian(*g, f), h);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    // -<f, Delta f> is the gradient quadratic form.
    CHECK(-inner(*g, f, apply_laplacian(*g, f)) == doctest::Approx(gradient_norm2(*g, f)).epsilon(1e-12));
  }
}

TEST_CASE("grid identity and extension") {
  auto a = SymmetryGrid::radial(4, 10.0, 100);
  auto b = SymmetryGrid::radial(4, 10.0, 100);
  auto c = SymmetryGrid::radial(4, 10.0, 101);
  CHECK(a->same_as(*b));
  CHECK_FALSE(a->same_as(*c));
  auto e = a->extended(20);
  CHECK(e->n_rho() == 120);
  CHECK(e->rho_node(99) == a->rho_node(99));
  CHECK_THROWS_AS(require_same_grid(*a, *c), Error);
}
