#include "qnls/cutoff.hpp"

#include <cmath>
#include <limits>

namespace qnls::cutoff {

namespace {

constexpr double kWidth = 2.0 - kS1;
const double kSqrt3 = std::sqrt(3.0);
// Left data of the bridge: zeta, zeta', zeta'' at s1.
const double kZ0 = 2.0 + 4.0 / (3.0 * kSqrt3);
const double kZ2 = -4.0 * kSqrt3;

// Quintic Hermite basis for unit value (h0) and unit second derivative (h2) at t = 0,
// all of value, slope and curvature vanishing at t = 1.
double h0(double t, int k) {
  switch (k) {
    case 0: return 1.0 + t * t * t * (-10.0 + t * (15.0 - 6.0 * t));
    case 1: return t * t * (-30.0 + t * (60.0 - 30.0 * t));
    case 2: return t * (-60.0 + t * (180.0 - 120.0 * t));
    default: return -60.0 + t * (360.0 - 360.0 * t);
  }
}
double h2(double t, int k) {
  switch (k) {
    case 0: return t * t * (0.5 + t * (-1.5 + t * (1.5 - 0.5 * t)));
    case 1: return t * (1.0 + t * (-4.5 + t * (6.0 - 2.5 * t)));
    case 2: return 1.0 + t * (-9.0 + t * (18.0 - 10.0 * t));
    default: return -9.0 + t * (36.0 - 30.0 * t);
  }
}
// Antiderivatives vanishing at t = 0.
double h0_int(double t) { return t + t * t * t * t * (-2.5 + t * (3.0 - t)); }
double h2_int(double t) { return t * t * t * (1.0 / 6.0 + t * (-0.375 + t * (0.3 - t / 12.0))); }

double chi_s1() {
  const double x = kS1 - 1.0;
  return kS1 * kS1 - 0.5 * x * x * x * x;
}

}  // namespace

double zeta(double s, int k) {
  if (s < 0.0) throw Error("zeta: negative argument");
  if (k < 0 || k > 3) throw Error("zeta: derivative order must be 0..3");
  if (s <= 1.0) {
    if (k == 0) return 2.0 * s;
    return k == 1 ? 2.0 : 0.0;
  }
  if (s <= kS1) {
    const double x = s - 1.0;
    switch (k) {
      case 0: return 2.0 * (s - x * x * x);
      case 1: return 2.0 - 6.0 * x * x;
      case 2: return -12.0 * x;
      default: return -12.0;
    }
  }
  if (s < 2.0) {
    const double t = (s - kS1) / kWidth;
    const double scale = std::pow(kWidth, -k);
    return scale * (kZ0 * h0(t, k) + kZ2 * kWidth * kWidth * h2(t, k));
  }
  return 0.0;
}

double chi(double s) {
  if (s < 0.0) throw Error("chi: negative argument");
  if (s <= 1.0) return s * s;
  if (s <= kS1) {
    const double x = s - 1.0;
    return s * s - 0.5 * x * x * x * x;
  }
  const double t = std::min(1.0, (s - kS1) / kWidth);
  return chi_s1() + kWidth * (kZ0 * h0_int(t) + kZ2 * kWidth * kWidth * h2_int(t));
}

double chi_plateau() { return chi(2.0); }

CutoffProfile CutoffProfile::radial(double R) {
  if (!(R > 0.0)) throw Error("cut-off scale R must be positive");
  CutoffProfile p;
  p.kind_ = ProfileKind::radial;
  p.R_ = R;
  return p;
}

CutoffProfile CutoffProfile::cylindrical(double R) {
  if (!(R > 0.0)) throw Error("cut-off scale R must be positive");
  CutoffProfile p;
  p.kind_ = ProfileKind::cylindrical;
  p.R_ = R;
  return p;
}

CutoffProfile CutoffProfile::unclipped() {
  CutoffProfile p;
  p.kind_ = ProfileKind::unclipped;
  p.R_ = std::numeric_limits<double>::infinity();
  return p;
}

double CutoffProfile::f(double rho, int k) const {
  if (!clipped()) {
    if (k == 0) return rho * rho;
    if (k == 1) return 2.0 * rho;
    return k == 2 ? 2.0 : 0.0;
  }
  const double s = rho / R_;
  if (k == 0) return R_ * R_ * chi(s);
  // d^k/drho^k [R^2 chi(rho/R)] = R^{2-k} zeta^{(k-1)}(s)
  return std::pow(R_, 2 - k) * zeta(s, k - 1);
}

double CutoffProfile::lap_f(double rho, int m) const {
  if (!clipped() || rho <= R_) return 2.0 * m;
  return f(rho, 2) + (m - 1.0) * f(rho, 1) / rho;
}

double CutoffProfile::lap_f_prime(double rho, int m) const {
  if (!clipped() || rho <= R_) return 0.0;
  const double r = rho, mm = m - 1.0;
  return f(r, 3) + mm * (f(r, 2) / r - f(r, 1) / (r * r));
}

double CutoffProfile::bilap_f(double rho, int m) const {
  if (!clipped() || rho <= R_) return 0.0;
  const double r = rho, mm = m - 1.0;
  const double f1 = f(r, 1), f2 = f(r, 2), f3 = f(r, 3), f4 = f(r, 4);
  // g = f'' + (m-1) f'/r; Delta^2 f = g'' + (m-1) g'/r.
  const double g1 = f3 + mm * (f2 / r - f1 / (r * r));
  const double g2 = f4 + mm * (f3 / r - 2.0 * f2 / (r * r) + 2.0 * f1 / (r * r * r));
  return g2 + mm * g1 / r;
}

double CutoffProfile::theta2(double rho, int m) const {
  if (!clipped() || rho <= R_) return 0.0;
  return (2.0 - f(rho, 2)) + (m - 1.0) * (2.0 - f(rho, 1) / rho);
}

void CutoffProfile::require_compatible(const SymmetryGrid& g) const {
  if (kind_ == ProfileKind::radial && !g.is_radial()) throw Error("radial cut-off needs a radial grid");
  if (kind_ == ProfileKind::cylindrical && g.is_radial()) throw Error("cylindrical cut-off needs a cylindrical grid");
}

WeightPair weight_pair(const CutoffProfile& p, const SymmetryGrid& g) {
  p.require_compatible(g);
  WeightPair w;
  w.m = g.rho_exponent();
  w.theta1.resize(g.size());
  w.theta2.resize(g.size());
  for (int i = 0; i < g.n_rho(); ++i) {
    const double r = g.rho_node(i);
    const double t1 = p.clipped() && r > p.R() ? p.theta1(r) : 0.0;
    const double t2 = p.theta2(r, w.m);
    for (int k = 0; k < g.n_z(); ++k) {
      w.theta1[g.index(i, k)] = t1;
      w.theta2[g.index(i, k)] = t2;
    }
  }
  return w;
}

double bound_exponent(ProfileKind kind) {
  if (kind == ProfileKind::radial) return 1.5;
  if (kind == ProfileKind::cylindrical) return 1.0;
  throw Error("unclipped weight has no localized bound");
}

int theta2_factor(ProfileKind kind) {
  if (kind == ProfileKind::radial) return 3;
  if (kind == ProfileKind::cylindrical) return 2;
  throw Error("unclipped weight has no localized bound");
}

Certificate certify_pointwise_inequality(ProfileKind kind, double C, double R, int samples_per_piece) {
  if (!(C > 0.0)) throw Error("certify: C must be positive");
  if (!(R > 1.0)) throw Error("certify: R must exceed 1");
  if (samples_per_piece < 10000) throw Error("certify: at least 10^4 samples per piece");
  const double p = bound_exponent(kind);
  const double mm = theta2_factor(kind);
  const double coef = C * std::pow(R, -p);
  auto th1 = [](double s) { return 2.0 - zeta(s, 1); };
  auto th2 = [&](double s) { return (2.0 - zeta(s, 1)) + mm * (2.0 - zeta(s) / s); };

  Certificate c;
  c.margin = std::numeric_limits<double>::infinity();
  c.k_ratio = std::numeric_limits<double>::infinity();
  auto visit = [&](double s) {
    const double a = th1(s), b = th2(s);
    const double m = a - coef * b * b;
    if (m < c.margin) {
      c.margin = m;
      c.r_min_margin = s * R;
    }
    if (b > 0.0) c.k_ratio = std::min(c.k_ratio, a / (b * b));
    ++c.samples;
  };
  // Pieces (1, s1], (s1, 2), and the constant tail s >= 2; knots are visited exactly.
  const double pieces[3][2] = {{1.0, kS1}, {kS1, 2.0}, {2.0, 3.0}};
  for (const auto& pc : pieces) {
    for (int i = 1; i <= samples_per_piece; ++i) visit(pc[0] + (pc[1] - pc[0]) * i / samples_per_piece);
  }
  visit(kS1);
  visit(2.0);
  // On s <= 1 both weights vanish identically.
  c.inner_margin = 0.0;
  for (int i = 0; i <= samples_per_piece; ++i) {
    const double s = static_cast<double>(i) / samples_per_piece;
    c.inner_margin = std::max(c.inner_margin, std::abs(th1(s)));
  }
  c.holds = c.margin >= 0.0 && c.inner_margin == 0.0;
  c.c_max = c.k_ratio * std::pow(R, p);
  return c;
}

double min_admissible_R(ProfileKind kind, double C, double r_cap) {
  auto ok = [&](double R) { return certify_pointwise_inequality(kind, C, R).holds; };
  double lo = 1.0, hi = 1.01;
  if (ok(hi)) return hi;
  while (!ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > r_cap) throw Error("min_admissible_R: no admissible R below the cap");
  }
  while (hi / lo > 1.01) {
    const double mid = std::sqrt(lo * hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<bool> admissible_scan(ProfileKind kind, double C, const std::vector<double>& Rs) {
  std::vector<bool> out;
  out.reserve(Rs.size());
  for (double R : Rs) out.push_back(certify_pointwise_inequality(kind, C, R).holds);
  return out;
}

}  // namespace qnls::cutoff
