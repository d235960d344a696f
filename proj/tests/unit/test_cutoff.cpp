#include <doctest.h>

#include <cmath>

#include "qnls/cutoff.hpp"

using namespace qnls;
using namespace qnls::cutoff;

TEST_CASE("zeta is C^2 across every knot") {
  for (double s : {1.0, kS1, 2.0}) {
    for (int k = 0; k <= 2; ++k) {
      const double left = zeta(s * (1 - 1e-13), k), right = zeta(s * (1 + 1e-13), k);
      CHECK(left == doctest::Approx(right).epsilon(1e-9).scale(1.0));
    }
  }
  CHECK(zeta(2.5) == 0.0);
  CHECK(zeta(0.3) == doctest::Approx(0.6));
}

TEST_CASE("chi is the antiderivative of zeta") {
  for (double s : {0.5, 1.0, 1.3, kS1, 1.8, 2.0, 3.0}) {
    // Simpson on 2000 panels.
    const int n = 2000;
    double acc = zeta(0.0) + zeta(s);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * zeta(s * i / n);
    CHECK(chi(s) == doctest::Approx(acc * s / (3.0 * n)).epsilon(1e-10));
  }
  CHECK(chi(0.7) == doctest::Approx(0.49).epsilon(1e-15));
  CHECK(chi(5.0) == chi_plateau());
}

TEST_CASE("theta1 at r = 1.5R equals 6(r/R - 1)^2") {
  for (double R : {1.0, 2.0, 7.5}) {
    const auto p = CutoffProfile::radial(R);
    CHECK(p.theta1(1.5 * R) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(p.theta1(0.5 * R) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  }
}

TEST_CASE("profile derivatives match finite differences") {
  const auto p = CutoffProfile::radial(2.0);
  const double h = 1e-5;
  for (double r : {1.0, 2.5, 3.6, 5.0}) {
    for (int k = 0; k < 3; ++k) {
      const double fd = (p.f(r + h, k) - p.f(r - h, k)) / (2 * h);
      CHECK(p.f(r, k + 1) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
    const double fd = (p.lap_f(r + h, 4) - p.lap_f(r - h, 4)) / (2 * h);
    CHECK(p.lap_f_prime(r, 4) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("certification: minimal admissible R and monotone scan") {
  for (ProfileKind kind : {ProfileKind::radial, ProfileKind::cylindrical}) {
    const double rmin = min_admissible_R(kind, 1.0);
    CHECK(certify_pointwise_inequality(kind, 1.0, rmin).holds);
    CHECK_FALSE(certify_pointwise_inequality(kind, 1.0, 0.9 * rmin).holds);
    std::vector<double> Rs;
    for (int k = 0; k < 30; ++k) Rs.push_back(1.1 * std::pow(1000.0, k / 29.0));
    const auto ok = admissible_scan(kind, 1.0, Rs);
    for (std::size_t i = 1; i < ok.size(); ++i) CHECK((!ok[i - 1] || ok[i]));
    const auto c = certify_pointwise_inequality(kind, 1.0, 2.0 * rmin);
    CHECK(c.inner_margin == 0.0);
    CHECK(c.c_max >= 1.0);
  }
}
