#include "qnls/functionals.hpp"

#include <cmath>

#include "qnls/groundstate.hpp"

namespace qnls {

SystemState SystemState::zeros(GridPtr g, double kappa) {
  SystemState s;
  s.u.assign(g->size(), cplx(0.0));
  s.v.assign(g->size(), cplx(0.0));
  s.grid = std::move(g);
  s.kappa = kappa;
  return s;
}

void SystemState::validate() const {
  if (!grid) throw Error("state has no grid");
  if (!(kappa > 0.0)) throw Error("kappa must be positive");
  if (u.size() != grid->size() || v.size() != grid->size()) throw Error("grid mismatch between u and v");
}

double potential_energy(const SymmetryGrid& g, const ComplexField& u, const ComplexField& v) {
  require_size(g, u.size());
  require_size(g, v.size());
  const auto& w = g.weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const cplx cu = std::conj(u[j]);
    acc += w[j] * (v[j] * cu * cu).real();
  }
  return acc;
}

FunctionalReport report_from(int d, double mass, double kinetic, double potential) {
  FunctionalReport r;
  r.d = d;
  r.mass = mass;
  r.kinetic = kinetic;
  r.potential = potential;
  r.energy = 0.5 * kinetic - potential;
  r.pohozaev_g = kinetic - 0.5 * d * potential;
  r.kinetic_y = kinetic;
  return r;
}

FunctionalReport evaluate_functionals(const SystemState& s) {
  s.validate();
  const SymmetryGrid& g = *s.grid;
  const double mass = norm2(g, s.u) + 2.0 * norm2(g, s.v);
  const double uy = gradient_rho(g, s.u), vy = gradient_rho(g, s.v);
  const double uz = gradient_z(g, s.u), vz = gradient_z(g, s.v);
  const double kin_y = uy + s.kappa * vy;
  const double kin_z = uz + s.kappa * vz;
  FunctionalReport r = report_from(g.dim(), mass, kin_y + kin_z, potential_energy(g, s.u, s.v));
  r.kinetic_y = kin_y;
  r.kinetic_z = kin_z;
  r.grad_u = uy + uz;
  return r;
}

FunctionalReport scale_report(const FunctionalReport& r, double lambda) {
  const double d = r.d;
  const double sm = std::pow(lambda, 4.0 - d);
  const double sk = std::pow(lambda, 6.0 - d);
  FunctionalReport out = report_from(r.d, r.mass * sm, r.kinetic * sk, r.potential * sk);
  out.kinetic_y = r.kinetic_y * sk;
  out.kinetic_z = r.kinetic_z * sk;
  out.grad_u = r.grad_u * sk;
  return out;
}

double gn_constant_from_groundstate(const GroundStatePair& gs, int d) {
  if (d != 4 && d != 5) throw Error("GN constant is defined for d = 4, 5");
  if (gs.mass <= 0.0 || gs.kinetic <= 0.0) throw Error("GN constant: zero denominator");
  return gs.potential / (std::pow(gs.mass, (6.0 - d) / 4.0) * std::pow(gs.kinetic, d / 4.0));
}

double sobolev_constant_from_groundstate(const GroundStatePair& gs) {
  if (gs.d != 6) throw Error("Sobolev constant requires d = 6");
  if (gs.kinetic <= 0.0) throw Error("Sobolev constant: zero kinetic energy");
  return gs.potential / std::pow(gs.kinetic, 1.5);
}

ThresholdConstants threshold_constants(const GroundStatePair& gs) {
  ThresholdConstants th;
  th.d = gs.d;
  th.kappa = gs.kappa;
  th.m_gs = gs.mass;
  th.t_gs = gs.kinetic;
  th.p_gs = gs.potential;
  th.e_gs = 0.5 * gs.kinetic - gs.potential;
  th.e_m = th.e_gs * gs.mass;
  th.t_m = th.t_gs * gs.mass;
  th.p_m = th.p_gs * gs.mass;
  if (gs.d == 6)
    th.c_sob = sobolev_constant_from_groundstate(gs);
  else
    th.c_gn = gn_constant_from_groundstate(gs, gs.d);
  return th;
}

Classification5d classify_5d(const FunctionalReport& r, const ThresholdConstants& th) {
  if (th.d != 5) throw Error("classify_5d needs d = 5 thresholds");
  Classification5d c;
  const double em = r.energy * r.mass, tm = r.kinetic * r.mass;
  const bool energy_ok = em < th.e_m;
  c.in_A = energy_ok && tm > th.t_m;
  c.in_A_tilde = energy_ok && r.pohozaev_g < 0.0;
  c.in_SC = energy_ok && tm < th.t_m;
  return c;
}

Classification5d classify_5d(const SystemState& s, const ThresholdConstants& th) { return classify_5d(evaluate_functionals(s), th); }

Classification6d classify_6d(const FunctionalReport& r, const ThresholdConstants& th) {
  if (th.d != 6) throw Error("classify_6d needs d = 6 thresholds");
  Classification6d c;
  const bool energy_ok = r.energy < th.e_gs;
  c.in_B = energy_ok && r.kinetic > th.t_gs;
  c.in_B_tilde = energy_ok && r.pohozaev_g < 0.0;
  return c;
}

Classification6d classify_6d(const SystemState& s, const ThresholdConstants& th) { return classify_6d(evaluate_functionals(s), th); }

double nu_from_rho(double rho, int d) {
  auto g = [d](double l) { return d == 5 ? 5.0 * l - 4.0 * std::pow(l, 1.25) : 3.0 * l - 2.0 * std::pow(l, 1.5); };
  const double target = 1.0 - rho;
  // g is strictly decreasing on (1, inf) with g(1) = 1.
  double lo = 1.0, hi = 1e6;
  if (g(hi) > target) throw Error("nu_from_rho: root outside (1, 1e6)");
  while (hi - lo > 1e-10 * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi) - 1.0;
}

UniformBoundConstants uniform_bound_constants(const FunctionalReport& r0, const ThresholdConstants& th) {
  UniformBoundConstants k;
  if (th.d == 5) {
    if (!(r0.energy * r0.mass < th.e_m && r0.kinetic * r0.mass > th.t_m)) throw Error("state not in the blow-up region");
    k.rho = 1.0 - r0.energy * r0.mass / th.e_m;
    k.nu = nu_from_rho(k.rho, 5);
    if (r0.energy < 0.0) {
      k.negative_energy = true;
      k.epsilon = 0.25;
      k.c = -2.5 * r0.energy;
    } else {
      k.epsilon = 0.5 * (k.rho + k.nu) / (4.0 * (1.0 + k.nu));
      k.c = (0.25 * (k.rho + k.nu) - k.epsilon * (1.0 + k.nu)) * th.t_gs * th.m_gs / r0.mass;
    }
  } else if (th.d == 6) {
    if (!(r0.energy < th.e_gs && r0.kinetic > th.t_gs)) throw Error("state not in the blow-up region");
    k.rho = 1.0 - r0.energy / th.e_gs;
    k.nu = nu_from_rho(k.rho, 6);
    if (r0.energy < 0.0) {
      k.negative_energy = true;
      k.epsilon = 0.5;
      k.c = -3.0 * r0.energy;
    } else {
      k.epsilon = 0.5 * (k.rho + k.nu) / (2.0 * (1.0 + k.nu));
      k.c = (0.5 * (k.rho + k.nu) - k.epsilon * (1.0 + k.nu)) * th.t_gs;
    }
  } else {
    throw Error("uniform bound constants need d = 5 or 6");
  }
  return k;
}

UniformBoundConstants uniform_bound_constants(const SystemState& s0, const ThresholdConstants& th) {
  return uniform_bound_constants(evaluate_functionals(s0), th);
}

}  // namespace qnls
