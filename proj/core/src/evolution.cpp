#include "qnls/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qnls {

namespace {

// (W + i c K) for one axis, c = beta tau / 2.
BandedLUNoPivot<cplx> cn_matrix(const Axis& ax, double c) {
  const int n = ax.size(), bw = ax.half_bandwidth();
  BandedLUNoPivot<cplx> lu(n, bw);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - bw); j <= std::min(n - 1, i + bw); ++j) {
      const double k = ax.stiffness(i, j);
      lu.at(i, j) = cplx(i == j ? ax.weights()[static_cast<std::size_t>(i)] : 0.0, c * k);
    }
  }
  lu.factorize();
  return lu;
}

// b = (W - i c K) f along a strided line, then solve in place.
void cn_line(const Axis& ax, const BandedLUNoPivot<cplx>& lu, double c, cplx* f, std::ptrdiff_t stride, std::vector<cplx>& work) {
  const int n = ax.size();
  work.resize(static_cast<std::size_t>(n));
  ax.stiffness_apply(f, stride, work.data(), 1);
  const auto& w = ax.weights();
  for (int i = 0; i < n; ++i) f[i * stride] = w[static_cast<std::size_t>(i)] * f[i * stride] - cplx(0.0, c) * work[static_cast<std::size_t>(i)];
  lu.solve(f, stride);
}

// Relative rate of the pointwise flow, used by the substep rule.
double nonlinear_rate(const SystemState& s) {
  double m2 = 0.0;
  for (std::size_t j = 0; j < s.u.size(); ++j) m2 = std::max(m2, std::max(std::norm(s.u[j]), std::norm(s.v[j])));
  return 2.0 * std::sqrt(m2);
}

}  // namespace

LinearPropagator::LinearPropagator(GridPtr g, double beta, double tau) : g_(std::move(g)), beta_(beta), tau_(tau) {
  if (!g_) throw Error("LinearPropagator: null grid");
  if (!(tau > 0.0)) throw Error("LinearPropagator: step must be positive");
  const double c = 0.5 * beta_ * tau_;
  rho_lu_ = cn_matrix(g_->rho(), c);
  if (!g_->is_radial()) z_lu_ = cn_matrix(g_->z(), c);
}

void LinearPropagator::sweep_rho(ComplexField& f) const {
  const double c = 0.5 * beta_ * tau_;
  const int nz = g_->n_z();
  std::vector<cplx> work;
  if (nz == 1) {
    cn_line(g_->rho(), rho_lu_, c, f.data(), 1, work);
    return;
  }
  // All rho lines share one factorization; sweeping them together keeps memory access contiguous.
  const Axis& ax = g_->rho();
  work.resize(f.size());
  ax.stiffness_apply_lines(f.data(), nz, nz, work.data());
  const auto& w = ax.weights();
  const cplx ic(0.0, c);
  for (int i = 0; i < ax.size(); ++i) {
    const double wi = w[static_cast<std::size_t>(i)];
    cplx* fi = f.data() + static_cast<std::ptrdiff_t>(i) * nz;
    const cplx* ki = work.data() + static_cast<std::ptrdiff_t>(i) * nz;
    for (int k = 0; k < nz; ++k) fi[k] = wi * fi[k] - ic * ki[k];
  }
  rho_lu_.solve_lines(f.data(), nz, nz);
}

void LinearPropagator::sweep_z(ComplexField& f) const {
  const double c = 0.5 * beta_ * tau_;
  const int nz = g_->n_z();
  std::vector<cplx> work;
  for (int i = 0; i < g_->n_rho(); ++i) cn_line(g_->z(), z_lu_, c, f.data() + static_cast<std::ptrdiff_t>(i) * nz, 1, work);
}

void LinearPropagator::apply(ComplexField& f) const {
  require_size(*g_, f.size());
  sweep_rho(f);
  if (!g_->is_radial()) sweep_z(f);
}

void IntegratorConfig::validate() const {
  if (!(dt0 > 0.0)) throw Error("IntegratorConfig: dt0 must be positive");
  if (!(dt_min > 0.0) || !(dt_min < dt0)) throw Error("IntegratorConfig: need 0 < dt_min < dt0");
  if (!(t_end > 0.0)) throw Error("IntegratorConfig: horizon must be positive");
  if (!(c_adapt > 0.0)) throw Error("IntegratorConfig: c_adapt must be positive");
  if (monitor_stride < 1) throw Error("IntegratorConfig: monitor_stride must be at least 1");
  if (!(blowup_factor > 1.0)) throw Error("IntegratorConfig: blowup_factor must exceed 1");
  if (!(shell_limit > 0.0)) throw Error("IntegratorConfig: shell_limit must be positive");
  if (max_steps < 1) throw Error("IntegratorConfig: max_steps must be positive");
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::reached_horizon: return "reached_horizon";
    case Termination::blowup_detected: return "blowup_detected";
    case Termination::dt_underflow: return "dt_underflow";
    default: return "boundary_contamination";
  }
}

void nonlinear_substep(SystemState& s, double dt) {
  if (!(dt > 0.0)) throw Error("nonlinear_substep: dt must be positive");
  const double lam = nonlinear_rate(s);
  const int nsub = std::clamp(static_cast<int>(std::ceil(dt * lam / 0.05)), 1, 4);
  const double h = dt / nsub;
  const cplx I(0.0, 1.0);
  auto ru = [&](cplx u, cplx v) { return 2.0 * I * v * std::conj(u); };
  auto rv = [&](cplx u) { return I * u * u; };
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    cplx u = s.u[j], v = s.v[j];
    const double dens = std::norm(u) + 2.0 * std::norm(v);
    if (dens == 0.0) continue;
    for (int q = 0; q < nsub; ++q) {
      const cplx k1u = ru(u, v), k1v = rv(u);
      const cplx u2 = u + 0.5 * h * k1u, v2 = v + 0.5 * h * k1v;
      const cplx k2u = ru(u2, v2), k2v = rv(u2);
      const cplx u3 = u + 0.5 * h * k2u, v3 = v + 0.5 * h * k2v;
      const cplx k3u = ru(u3, v3), k3v = rv(u3);
      const cplx u4 = u + h * k3u, v4 = v + h * k3v;
      const cplx k4u = ru(u4, v4), k4v = rv(u4);
      u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    // The exact flow keeps |u|^2 + 2|v|^2; projecting back removes the O(h^5) drift.
    const double scale = std::sqrt(dens / (std::norm(u) + 2.0 * std::norm(v)));
    s.u[j] = u * scale;
    s.v[j] = v * scale;
  }
}

Integrator::Integrator(GridPtr g, double kappa, bool nonlinear) : g_(std::move(g)), kappa_(kappa), nonlinear_(nonlinear) {
  if (!g_) throw Error("Integrator: null grid");
  if (!(kappa > 0.0)) throw Error("Integrator: kappa must be positive");
}

const LinearPropagator& Integrator::propagator(int comp, double tau) {
  auto& slot = cache_[comp];
  if (!slot || slot->tau() != tau) slot.emplace(g_, comp == 0 ? 1.0 : kappa_, tau);
  return *slot;
}

void Integrator::step(SystemState& s, double dt) {
  if (!(dt > 0.0)) throw Error("step: dt must be positive");
  if (!s.grid || !s.grid->same_as(*g_)) throw Error("step: state grid differs from the integrator grid");
  const double half = 0.5 * dt;
  propagator(0, half).apply(s.u);
  propagator(1, half).apply(s.v);
  if (nonlinear_) nonlinear_substep(s, dt);
  propagator(0, half).apply(s.u);
  propagator(1, half).apply(s.v);
  s.t += dt;
}

SystemState step(const SystemState& s, double dt) {
  s.validate();
  SystemState out = s;
  Integrator(s.grid, s.kappa).step(out, dt);
  return out;
}

double outer_shell_fraction(const SystemState& s) {
  const SymmetryGrid& g = *s.grid;
  const auto& w = g.weights();
  const double rcut = 0.9 * g.rho().extent();
  const double zcut = g.is_radial() ? std::numeric_limits<double>::infinity() : 0.9 * g.z().extent();
  double total = 0.0, outer = 0.0;
  for (int i = 0; i < g.n_rho(); ++i) {
    for (int k = 0; k < g.n_z(); ++k) {
      const std::size_t j = g.index(i, k);
      const double m = w[j] * (std::norm(s.u[j]) + 2.0 * std::norm(s.v[j]));
      total += m;
      if (g.rho_node(i) > rcut || std::abs(g.z_node(k)) > zcut) outer += m;
    }
  }
  return total > 0.0 ? outer / total : 0.0;
}

TrajectoryRecord evolve(const SystemState& s0, const IntegratorConfig& cfg, const std::vector<VirialMonitor>& monitors) {
  cfg.validate();
  s0.validate();
  SystemState s = s0;
  Integrator integ(s.grid, s.kappa, cfg.nonlinear);
  std::vector<detail::ProfileSamples> cached;
  TrajectoryRecord rec;
  for (const auto& m : monitors) {
    cached.push_back(detail::sample_profile(m.profile, *s.grid));
    rec.monitor_names.push_back(m.name);
  }
  rec.initial = evaluate_functionals(s);
  const double M0 = rec.initial.mass, E0 = rec.initial.energy, T0 = rec.initial.kinetic;

  auto take_sample = [&](long n, double dt, const FunctionalReport& f) {
    TrajectorySample smp;
    smp.step = n;
    smp.t = s.t;
    smp.dt = dt;
    smp.f = f;
    smp.mass_drift = M0 > 0.0 ? std::abs(f.mass - M0) / M0 : std::abs(f.mass);
    smp.energy_drift = std::abs(f.energy - E0) / std::max(1.0, std::abs(E0));
    smp.shell_fraction = outer_shell_fraction(s);
    smp.dz_norm = gradient_z(*s.grid, s.u);
    rec.max_dz_norm = std::max(rec.max_dz_norm, smp.dz_norm);
    for (const auto& m : monitors) smp.virial.push_back(virial_report(s, m.profile, m.bound, m.c_est));
    rec.samples.push_back(std::move(smp));
    return rec.samples.back().shell_fraction;
  };
  auto record_step = [&]() {
    if (!cfg.record_m_phi_steps) return;
    rec.step_times.push_back(s.t);
    std::vector<double> row;
    row.reserve(cached.size());
    for (const auto& ps : cached) row.push_back(detail::m_phi_sampled(s, ps));
    rec.step_m_phi.push_back(std::move(row));
  };

  take_sample(0, 0.0, rec.initial);
  record_step();
  FunctionalReport f = rec.initial;
  const double t_stop = s.t + cfg.t_end;
  double dt = cfg.dt0;
  long n = 0;
  bool sampled_last = true;
  rec.termination = Termination::reached_horizon;
  while (true) {
    const double remaining = t_stop - s.t;
    // Accumulated round-off in t must not trigger a sliver step at the horizon.
    if (remaining <= 1e-6 * std::min(dt, cfg.dt0)) break;
    if (n >= cfg.max_steps) throw Error("evolve: step budget exhausted before the horizon");
    dt = cfg.dt0;
    if (cfg.adapt && f.kinetic > 0.0) {
      // Dyadic levels dt0 / 2^k keep the cached factorizations valid between steps.
      const double cap = cfg.c_adapt / f.kinetic;
      while (dt > cap && dt >= cfg.dt_min) dt *= 0.5;
    }
    if (dt < cfg.dt_min) {
      rec.termination = Termination::dt_underflow;
      break;
    }
    dt = std::min(dt, remaining);
    integ.step(s, dt);
    ++n;
    f = evaluate_functionals(s);
    record_step();
    sampled_last = false;
    if (T0 > 0.0 && f.kinetic > cfg.blowup_factor * T0) {
      rec.termination = Termination::blowup_detected;
      break;
    }
    if (n % cfg.monitor_stride == 0) {
      sampled_last = true;
      if (take_sample(n, dt, f) > cfg.shell_limit) {
        rec.termination = Termination::boundary_contamination;
        break;
      }
    }
  }
  if (!sampled_last) take_sample(n, dt, f);
  rec.steps = n;
  rec.t_final = s.t;
  rec.final_state = std::move(s);
  return rec;
}

MonotoneCheck monotone_bound_check(const TrajectoryRecord& rec, double E0, std::size_t index, double tol) {
  MonotoneCheck out;
  if (!(E0 < 0.0) || rec.samples.empty()) return out;
  if (index >= rec.samples.front().virial.size()) throw Error("monotone_bound_check: monitor index out of range");
  out.applicable = true;
  const double t_start = rec.samples.front().t;
  const double m0 = rec.samples.front().virial[index].m_phi;
  out.t0 = std::abs(m0) / (-4.0 * E0);
  for (const auto& smp : rec.samples) {
    const double t = smp.t - t_start;
    const double m = smp.virial[index].m_phi;
    const double major = m0 + 8.0 * E0 * t;
    if (m > major + tol * std::abs(E0) * t) {
      out.holds = false;
      out.violations.push_back({smp.t, m, major});
    }
    if (t >= out.t0 && t > 0.0 && m > 4.0 * E0 * t + tol * std::abs(E0) * t) out.late_bound_holds = false;
  }
  return out;
}

std::vector<VirialFdPoint> virial_fd_check(const TrajectoryRecord& rec, std::size_t index, double scale) {
  if (rec.step_times.empty()) throw Error("virial_fd_check: record has no per-step M_phi");
  if (rec.samples.empty() || index >= rec.samples.front().virial.size()) throw Error("virial_fd_check: missing monitor");
  if (!(scale > 0.0)) {
    for (const auto& s : rec.samples) scale = std::max(scale, std::abs(s.virial[index].ddt_exact));
    if (!(scale > 0.0)) scale = 1.0;
  }
  std::vector<VirialFdPoint> out;
  const auto& ts = rec.step_times;
  for (const auto& s : rec.samples) {
    const long n = s.step;
    if (n < 1 || n + 1 >= static_cast<long>(ts.size())) continue;
    const double h0 = ts[n] - ts[n - 1], h1 = ts[n + 1] - ts[n];
    // Unequal neighbours (adaptive level change, horizon step) drop the difference to first order.
    if (std::abs(h0 - h1) > 1e-9 * std::max(h0, h1)) continue;
    VirialFdPoint p;
    p.t = s.t;
    p.fd = (rec.step_m_phi[n + 1][index] - rec.step_m_phi[n - 1][index]) / (h0 + h1);
    p.exact = s.virial[index].ddt_exact;
    p.rel = std::abs(p.fd - p.exact) / std::max(std::abs(p.exact), scale);
    out.push_back(p);
  }
  return out;
}

GrowupFit growup_rate_fit(const std::vector<double>& t, const std::vector<double>& T, double t_from) {
  if (t.size() != T.size()) throw Error("growup_rate_fit: size mismatch");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, tmin = std::numeric_limits<double>::infinity(), tmax = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || t[i] < t_from || !(T[i] > 0.0)) continue;
    const double x = std::log(t[i]), y = std::log(T[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    tmin = std::min(tmin, t[i]);
    tmax = std::max(tmax, t[i]);
    ++n;
  }
  if (n < 3 || tmax < 100.0 * tmin) throw Error("growup_rate_fit: need at least two decades of t");
  GrowupFit g;
  g.samples = n;
  const double den = n * sxx - sx * sx;
  g.exponent_fit = (n * sxy - sx * sy) / den;
  g.c_fit = std::exp((sy - g.exponent_fit * sx) / n);
  return g;
}

GrowupFit growup_rate_fit(const TrajectoryRecord& rec, double t_from) {
  std::vector<double> t, T;
  for (const auto& s : rec.samples) {
    t.push_back(s.t);
    T.push_back(s.f.kinetic);
  }
  return growup_rate_fit(t, T, t_from);
}

OdeBlowup ode_blowup_projection(const std::vector<double>& t, const std::vector<double>& m, double a_const) {
  if (t.size() != m.size() || t.size() < 2) throw Error("ode_blowup_projection: need two or more samples");
  if (!(a_const > 0.0)) throw Error("ode_blowup_projection: A must be positive");
  OdeBlowup o;
  o.a_const = a_const;
  o.t = t;
  o.t0 = t.front();
  o.t1 = t.back();
  o.z_series.assign(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    o.z_series[i] = o.z_series[i - 1] + 0.5 * (t[i] - t[i - 1]) * (m[i] * m[i] + m[i - 1] * m[i - 1]);
    if (!(o.z_series[i] > o.z_series[i - 1])) throw Error("ode_blowup_projection: z(t) is not increasing");
  }
  o.projected_t_star = o.t1 + 1.0 / (a_const * a_const * o.z_series.back());
  return o;
}

OdeBlowup ode_blowup_diagnostic(const TrajectoryRecord& rec, double epsilon, double c, std::size_t index) {
  if (!(epsilon > 0.0)) throw Error("ode_blowup_diagnostic: epsilon must be positive");
  if (!(c > 0.0)) throw Error("ode_blowup_diagnostic: c must be positive");
  if (rec.samples.empty() || index >= rec.samples.front().virial.size()) throw Error("ode_blowup_diagnostic: missing monitor");
  double cphi = 0.0;
  for (const auto& s : rec.samples) {
    if (s.f.kinetic > 0.0) cphi = std::max(cphi, std::abs(s.virial[index].m_phi) / std::sqrt(s.f.kinetic));
  }
  if (!(cphi > 0.0)) throw Error("ode_blowup_diagnostic: M_phi vanishes along the record");
  // t0: start of the final stretch on which M_phi stays negative.
  std::size_t first = rec.samples.size();
  while (first > 0 && rec.samples[first - 1].virial[index].m_phi < 0.0) --first;
  if (rec.samples.size() - first < 2) throw Error("ode_blowup_diagnostic: M_phi does not turn negative");
  std::vector<double> t, m;
  for (std::size_t i = first; i < rec.samples.size(); ++i) {
    t.push_back(rec.samples[i].t);
    m.push_back(rec.samples[i].virial[index].m_phi);
  }
  OdeBlowup o = ode_blowup_projection(t, m, 4.0 * epsilon / (cphi * cphi));
  o.c_phi = cphi;
  return o;
}

SystemState gaussian_pair(GridPtr g, double kappa, double A, double B, double width, double chirp) {
  if (!(width > 0.0)) throw Error("gaussian_pair: width must be positive");
  SystemState s = SystemState::zeros(g, kappa);
  const SymmetryGrid& G = *s.grid;
  for (int i = 0; i < G.n_rho(); ++i) {
    for (int k = 0; k < G.n_z(); ++k) {
      const double r2 = G.rho_node(i) * G.rho_node(i) + G.z_node(k) * G.z_node(k);
      const cplx e = std::exp(-r2 / (width * width)) * std::polar(1.0, chirp * r2);
      s.u[G.index(i, k)] = A * e;
      s.v[G.index(i, k)] = B * e;
    }
  }
  return s;
}

void normalize_mass(SystemState& s, double mass) {
  if (!(mass > 0.0)) throw Error("normalize_mass: mass must be positive");
  const double m = norm2(*s.grid, s.u) + 2.0 * norm2(*s.grid, s.v);
  if (!(m > 0.0)) throw Error("normalize_mass: zero state");
  const double a = std::sqrt(mass / m);
  for (auto& x : s.u) x *= a;
  for (auto& x : s.v) x *= a;
}

SystemState shell_pair(GridPtr g, double kappa, double r0, double width, double mass, double v_ratio) {
  if (!(width > 0.0) || !(r0 >= 0.0)) throw Error("shell_pair: need r0 >= 0 and width > 0");
  SystemState s = SystemState::zeros(g, kappa);
  const SymmetryGrid& G = *s.grid;
  for (int i = 0; i < G.n_rho(); ++i) {
    const double x = (G.rho_node(i) - r0) / width;
    for (int k = 0; k < G.n_z(); ++k) {
      const double zk = G.z_node(k);
      const double e = std::exp(-x * x - zk * zk);
      s.u[G.index(i, k)] = e;
      s.v[G.index(i, k)] = v_ratio * e;
    }
  }
  normalize_mass(s, mass);
  return s;
}

SystemState scaled_ground_state(const GroundStatePair& gs, GridPtr g, double lambda, double amplitude) {
  if (!(lambda > 0.0)) throw Error("scaled_ground_state: lambda must be positive");
  if (!g || g->dim() != gs.d) throw Error("scaled_ground_state: target grid has a different dimension");
  SystemState s = SystemState::zeros(g, gs.kappa);
  const SymmetryGrid& G = *s.grid;
  const double pref = amplitude * lambda * lambda;
  for (int i = 0; i < G.n_rho(); ++i) {
    for (int k = 0; k < G.n_z(); ++k) {
      const double r = lambda * std::hypot(G.rho_node(i), G.z_node(k));
      s.u[G.index(i, k)] = pref * interpolate_radial(*gs.grid, gs.phi, r);
      s.v[G.index(i, k)] = pref * interpolate_radial(*gs.grid, gs.psi, r);
    }
  }
  return s;
}

}  // namespace qnls
