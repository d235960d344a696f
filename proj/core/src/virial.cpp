#include "qnls/virial.hpp"

#include <cmath>

namespace qnls {

using cutoff::CutoffProfile;
using cutoff::ProfileKind;

const char* bound_name(BoundKind b) {
  switch (b) {
    case BoundKind::radial_4d: return "radial_4d";
    case BoundKind::cylindrical_4d: return "cylindrical_4d";
    case BoundKind::cylindrical_high: return "cylindrical_high";
    default: return "none";
  }
}

double VirialReport::remainder_coefficient() const {
  if (!(tail_normalizer > 0.0)) return 0.0;
  return std::abs(remainders.potential_tail) / tail_normalizer;
}

namespace detail {

namespace {

// The face sum sum_q A_q g(rho_q) Q_q is the trapezoid rule for int g Q rho^{m-1}, spectrally
// accurate on smooth integrands. g = d/drho Delta phi is only C^0 at the knots, where zeta''' jumps,
// which leaves an O(h^2) error -h^2/2 B2(theta) [g'] rho_k^{m-1} Q(rho_k) with theta the knot's
// fractional face position. Folding its negative onto the two neighbouring faces restores O(h^3).
void correct_face_kinks(const CutoffProfile& p, const Axis& ax, std::vector<double>& gf) {
  if (!p.clipped()) return;
  const double h = ax.h(), R = p.R();
  const auto& a = ax.face_weights();
  const int nq = ax.face_count();
  for (double s : {1.0, cutoff::kS1, 2.0}) {
    const double jump = (cutoff::zeta(std::nextafter(s, 3.0), 3) - cutoff::zeta(std::nextafter(s, 0.0), 3)) / (R * R);
    const double x = s * R / h;
    const double fl = std::floor(x);
    const double th = x - fl;
    // Faces sit at (q + 1) h; the knot lies between faces q0 and q0 + 1.
    const int q0 = static_cast<int>(fl) - 1;
    if (q0 < 0 || q0 + 1 >= nq) continue;
    const double b2 = th * th - th + 1.0 / 6.0;
    const double c = 0.5 * h * h * b2 * jump * std::pow(s * R, ax.m() - 1);
    gf[static_cast<std::size_t>(q0)] += c * (1.0 - th) / a[static_cast<std::size_t>(q0)];
    gf[static_cast<std::size_t>(q0 + 1)] += c * th / a[static_cast<std::size_t>(q0 + 1)];
  }
}

}  // namespace

ProfileSamples sample_profile(const CutoffProfile& p, const SymmetryGrid& g) {
  p.require_compatible(g);
  ProfileSamples s;
  s.m = g.rho_exponent();
  const double z_lap = g.is_radial() ? 0.0 : 2.0;
  s.lap.resize(g.size());
  s.bilap.resize(g.size());
  s.tail.resize(g.size());
  s.theta1.resize(g.size());
  s.theta2.resize(g.size());
  for (int i = 0; i < g.n_rho(); ++i) {
    const double r = g.rho_node(i);
    const double lf = p.lap_f(r, s.m), bl = p.bilap_f(r, s.m);
    const double t1 = 2.0 - p.f(r, 2), t2 = p.theta2(r, s.m);
    for (int k = 0; k < g.n_z(); ++k) {
      const std::size_t j = g.index(i, k);
      s.lap[j] = lf + z_lap;
      s.bilap[j] = bl;
      s.tail[j] = 2.0 * s.m - lf;
      s.theta1[j] = t1;
      s.theta2[j] = t2;
    }
  }
  const auto& rf = g.rho().faces();
  const std::size_t nq = rf.size();
  s.rho_lap_d.resize(nq);
  s.rho_f1.resize(nq);
  s.rho_f2.resize(nq);
  s.rho_defect.resize(nq);
  s.rho_theta1.resize(nq);
  s.rho_theta2sq.resize(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const double r = rf[q];
    s.rho_lap_d[q] = p.lap_f_prime(r, s.m);
    s.rho_f1[q] = p.f(r, 1);
    s.rho_f2[q] = p.f(r, 2);
    s.rho_defect[q] = 2.0 - s.rho_f2[q];
    s.rho_theta1[q] = s.rho_defect[q];
    const double t2 = p.theta2(r, s.m);
    s.rho_theta2sq[q] = t2 * t2;
  }
  correct_face_kinks(p, g.rho(), s.rho_lap_d);
  if (!g.is_radial()) {
    const auto& zf = g.z().faces();
    s.z_f1.resize(zf.size());
    for (std::size_t q = 0; q < zf.size(); ++q) s.z_f1[q] = 2.0 * zf[q];
  }
  return s;
}

double m_phi_sampled(const SystemState& s, const ProfileSamples& ps) {
  const SymmetryGrid& g = *s.grid;
  double acc = momentum_rho(g, s.u, ps.rho_f1) + momentum_rho(g, s.v, ps.rho_f1);
  if (!g.is_radial()) acc += momentum_z(g, s.u, ps.z_f1) + momentum_z(g, s.v, ps.z_f1);
  return 2.0 * acc;
}

}  // namespace detail

namespace {

using detail::m_phi_sampled;

struct Assembly {
  VirialReport rep;
  FunctionalReport fr;
  detail::ProfileSamples ps;
};

Assembly assemble(const SystemState& s, const CutoffProfile& p) {
  s.validate();
  Assembly a;
  const SymmetryGrid& g = *s.grid;
  a.ps = detail::sample_profile(p, g);
  a.fr = evaluate_functionals(s);
  const auto& w = g.weights();
  double pot = 0.0, tail = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const cplx cu = std::conj(s.u[j]);
    const double nl = (s.v[j] * cu * cu).real();
    pot += w[j] * a.ps.lap[j] * nl;
    tail += w[j] * a.ps.tail[j] * nl;
  }
  // -int Delta^2 phi dens = int d(Delta phi) d(dens), and d|f|^2 = 2 Re(conj(f) df).
  const double bil = -2.0 * (flux_rho(g, s.u, a.ps.rho_lap_d) + s.kappa * flux_rho(g, s.v, a.ps.rho_lap_d));
  const double hess_rho = 4.0 * (gradient_rho(g, s.u, a.ps.rho_f2) + s.kappa * gradient_rho(g, s.v, a.ps.rho_f2));
  const double hess_z = 8.0 * (gradient_z(g, s.u) + s.kappa * gradient_z(g, s.v));
  VirialReport& r = a.rep;
  r.t = s.t;
  r.m_phi = m_phi_sampled(s, a.ps);
  r.ddt_exact = -bil + hess_rho + hess_z - 2.0 * pot;
  r.g_value = 8.0 * a.fr.pohozaev_g;
  r.remainders.bilap = -bil;
  r.remainders.hessian_defect = 4.0 * (gradient_rho(g, s.u, a.ps.rho_defect) + s.kappa * gradient_rho(g, s.v, a.ps.rho_defect));
  r.remainders.potential_tail = 2.0 * tail;
  return a;
}

void finish_bound(VirialReport& r, double base, double shape, double c_est) {
  r.bound_base = base;
  r.bound_shape = shape;
  r.c_est = c_est;
  r.ddt_bound_rhs = base + c_est * shape;
}

}  // namespace

double m_phi(const SystemState& s, const CutoffProfile& p) {
  s.validate();
  return m_phi_sampled(s, detail::sample_profile(p, *s.grid));
}

VirialReport ddt_m_phi_exact(const SystemState& s, const CutoffProfile& p) { return assemble(s, p).rep; }

VirialReport radial_bound_4d(const SystemState& s, const CutoffProfile& p, double c_est) {
  if (!s.grid || !s.grid->is_radial() || s.grid->dim() != 4) throw Error("radial_bound_4d: needs a d = 4 radial state");
  if (p.kind() != ProfileKind::radial) throw Error("radial_bound_4d: needs the radial cut-off");
  Assembly a = assemble(s, p);
  const SymmetryGrid& g = *s.grid;
  const double R = p.R();
  const double th1 = gradient_rho(g, s.u, a.ps.rho_theta1);
  const double th2 = gradient_rho(g, s.u, a.ps.rho_theta2sq);
  const double base = 16.0 * a.fr.energy - 4.0 * th1;
  const double shape = 4.0 * std::pow(R, -1.5) * th2 + std::pow(R, -2.0) + std::pow(R, -1.5);
  a.rep.bound = BoundKind::radial_4d;
  a.rep.tail_normalizer = th2 + 1.0;
  finish_bound(a.rep, base, shape, c_est);
  return a.rep;
}

VirialReport cylindrical_bound(const SystemState& s, const CutoffProfile& p, int d, double c_est) {
  if (!s.grid || s.grid->is_radial()) throw Error("cylindrical_bound: needs a cylindrical state");
  if (s.grid->dim() != d) throw Error("cylindrical_bound: dimension mismatch");
  if (p.kind() != ProfileKind::cylindrical) throw Error("cylindrical_bound: needs the cylindrical cut-off");
  Assembly a = assemble(s, p);
  const SymmetryGrid& g = *s.grid;
  const double R = p.R();
  if (d == 4) {
    const double th1 = gradient_rho(g, s.u, a.ps.rho_theta1);
    const double th2 = gradient_rho(g, s.u, a.ps.rho_theta2sq);
    const double dz = gradient_z(g, s.u);
    const double base = 16.0 * a.fr.energy - 4.0 * th1;
    const double shape = 4.0 / R * th2 + dz / R + std::pow(R, -2.0) + 1.0 / R;
    a.rep.bound = BoundKind::cylindrical_4d;
    a.rep.tail_normalizer = th2 + dz + 1.0;
    finish_bound(a.rep, base, shape, c_est);
  } else if (d == 5 || d == 6) {
    const double gu = a.fr.grad_u;
    const double shape = std::pow(R, -(d - 2) / 2.0) * gu + std::pow(R, -2.0);
    a.rep.bound = BoundKind::cylindrical_high;
    a.rep.tail_normalizer = gu + 1.0;
    finish_bound(a.rep, a.rep.g_value, shape, c_est);
  } else {
    throw Error("cylindrical_bound: d must be 4, 5 or 6");
  }
  return a.rep;
}

BoundKind default_bound(const SymmetryGrid& g, const CutoffProfile& p) {
  if (!p.clipped()) return BoundKind::none;
  if (g.is_radial()) return g.dim() == 4 ? BoundKind::radial_4d : BoundKind::none;
  return g.dim() == 4 ? BoundKind::cylindrical_4d : BoundKind::cylindrical_high;
}

VirialReport virial_report(const SystemState& s, const CutoffProfile& p, BoundKind b, double c_est) {
  switch (b) {
    case BoundKind::radial_4d: return radial_bound_4d(s, p, c_est);
    case BoundKind::cylindrical_4d:
    case BoundKind::cylindrical_high: return cylindrical_bound(s, p, s.grid->dim(), c_est);
    default: return ddt_m_phi_exact(s, p);
  }
}

double calibrate_constant(const std::vector<VirialReport>& samples) {
  double c = 0.0;
  for (const auto& r : samples) {
    if (r.bound == BoundKind::none) throw Error("calibrate_constant: sample carries no bound");
    if (!(r.bound_shape > 0.0)) continue;
    c = std::max(c, (r.ddt_exact - r.bound_base) / r.bound_shape);
  }
  return c;
}

double bilap_sup(const CutoffProfile& p, const SymmetryGrid& g) {
  double s = 0.0;
  for (int i = 0; i < g.n_rho(); ++i) s = std::max(s, std::abs(p.bilap_f(g.rho_node(i), g.rho_exponent())));
  return s;
}

}  // namespace qnls
