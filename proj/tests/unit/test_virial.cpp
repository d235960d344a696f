#include <doctest.h>

#include <cmath>

#include "qnls/evolution.hpp"

using namespace qnls;
using cutoff::CutoffProfile;

TEST_CASE("unclipped weight: exact derivative equals 8G") {
  for (bool cyl : {false, true}) {
    auto g = cyl ? SymmetryGrid::cylindrical(5, 8.0, 96, 6.0, 96) : SymmetryGrid::radial(4, 10.0, 400);
    const auto s = gaussian_pair(g, 0.7, 2.0, 1.0, 1.0, 0.2);
    const auto r = ddt_m_phi_exact(s, CutoffProfile::unclipped());
    CHECK(r.ddt_exact == doctest::Approx(r.g_value).epsilon(1e-13));
    CHECK(r.g_value == doctest::Approx(8.0 * evaluate_functionals(s).pohozaev_g).epsilon(1e-13));
  }
}

TEST_CASE("M_phi of a chirped Gaussian matches its closed form") {
  // Unclipped weight: M_phi = 2 c d w^2 (A^2 + B^2) (pi w^2 / 2)^{d/2}.
  const double A = 1.2, B = 0.8, w = 1.1, c = 0.25;
  const int d = 4;
  auto g = SymmetryGrid::radial(d, 12.0, 1200);
  const double expect = 2 * c * d * w * w * (A * A + B * B) * std::pow(M_PI * w * w / 2, d / 2.0);
  CHECK(m_phi(gaussian_pair(g, 1.0, A, B, w, c), CutoffProfile::unclipped()) == doctest::Approx(expect).epsilon(1e-8));
  CHECK(m_phi(gaussian_pair(g, 1.0, A, B, w, 0.0), CutoffProfile::unclipped()) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("exact derivative decomposes into 8G and the remainders") {
  for (bool cyl : {false, true}) {
    auto g = cyl ? SymmetryGrid::cylindrical(4, 8.0, 96, 6.0, 96) : SymmetryGrid::radial(4, 10.0, 400);
    const auto s = gaussian_pair(g, 1.0, 3.0, 1.5, 1.2, -0.1);
    const auto p = cyl ? CutoffProfile::cylindrical(1.5) : CutoffProfile::radial(1.5);
    const auto r = ddt_m_phi_exact(s, p);
    const double sum = r.g_value - r.remainders.hessian_defect + r.remainders.bilap + r.remainders.potential_tail;
    CHECK(r.ddt_exact == doctest::Approx(sum).epsilon(1e-12));
    CHECK(r.remainders.hessian_defect >= 0.0);
  }
}

TEST_CASE("bounds are affine in the constant and calibration is tight") {
  auto g = SymmetryGrid::radial(4, 10.0, 400);
  const auto s = gaussian_pair(g, 1.0, 3.0, 1.5, 1.0, 0.1);
  const auto p = CutoffProfile::radial(2.0);
  const auto a = radial_bound_4d(s, p, 0.0), b = radial_bound_4d(s, p, 2.0);
  CHECK(a.ddt_exact == b.ddt_exact);
  CHECK(b.ddt_bound_rhs == doctest::Approx(a.bound_base + 2.0 * a.bound_shape).epsilon(1e-14));
  CHECK(default_bound(*g, p) == BoundKind::radial_4d);

  VirialReport x, y;
  x.bound = y.bound = BoundKind::radial_4d;
  x.ddt_exact = 3.0, x.bound_base = 1.0, x.bound_shape = 0.5;  // needs C = 4
  y.ddt_exact = 0.0, y.bound_base = 1.0, y.bound_shape = 2.0;  // holds for C = 0
  CHECK(calibrate_constant({x, y}) == doctest::Approx(4.0));
  CHECK(calibrate_constant({y}) == 0.0);
}

TEST_CASE("bi-Laplacian remainder vanishes for data inside the inner ball") {
  auto g = SymmetryGrid::radial(4, 12.0, 1200);
  const auto s = gaussian_pair(g, 1.0, 1.0, 0.5, 0.3);
  const auto r = ddt_m_phi_exact(s, CutoffProfile::radial(4.0));
  CHECK(std::abs(r.remainders.bilap) < 1e-12 * std::abs(r.g_value));
  CHECK(std::abs(r.remainders.potential_tail) < 1e-12 * std::abs(r.g_value));
}

TEST_CASE("bi-Laplacian face quadrature is third order across the profile knots") {
  // d/drho Delta phi is only continuous at the knots; the face sum must not inherit an O(h^2) term.
  const auto p = CutoffProfile::radial(2.3);
  auto bilap = [&](int n) { return ddt_m_phi_exact(gaussian_pair(SymmetryGrid::radial(4, 16.0, n), 1.0, 1.5, 0.75, 2.0), p).remainders.bilap; };
  const double ref = bilap(8192);
  CHECK(std::abs(bilap(500) / ref - 1.0) < 1e-4);
  CHECK(std::abs(bilap(611) / ref - 1.0) < 2e-5);
  CHECK(std::abs(bilap(1000) / ref - 1.0) < 2e-5);
}
