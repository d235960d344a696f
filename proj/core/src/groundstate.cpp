#include "qnls/groundstate.hpp"

#include <array>
#include <cmath>
#include <random>

#include "qnls/banded.hpp"

namespace qnls {

SystemState GroundStatePair::standing_wave(double theta) const {
  SystemState s = SystemState::zeros(grid, kappa);
  const cplx e1 = std::polar(1.0, theta), e2 = std::polar(1.0, 2.0 * theta);
  for (std::size_t j = 0; j < phi.size(); ++j) {
    s.u[j] = e1 * phi[j];
    s.v[j] = e2 * psi[j];
  }
  return s;
}

double interpolate_radial(const SymmetryGrid& g, const RealField& f, double r) {
  if (!g.is_radial()) throw Error("interpolate_radial needs a radial grid");
  require_size(g, f.size());
  const int n = g.n_rho();
  const double h = g.rho().h();
  r = std::abs(r);
  if (r >= g.rho().extent()) return 0.0;
  auto at = [&](int j) -> double {
    if (j < 0) return f[static_cast<std::size_t>(-1 - j)];
    if (j >= n) return -f[static_cast<std::size_t>(2 * n - 1 - j)];
    return f[static_cast<std::size_t>(j)];
  };
  const double x = r / h - 0.5;
  const int j = static_cast<int>(std::floor(x));
  const double t = x - j;
  // Cubic Lagrange through nodes j-1 .. j+2.
  const double c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return c0 * at(j - 1) + c1 * at(j) + c2 * at(j + 1) + c3 * at(j + 2);
}

RealField rescale_radial(const SymmetryGrid& g, const RealField& f, double lambda) {
  RealField out(f.size());
  for (int i = 0; i < g.n_rho(); ++i)
    out[static_cast<std::size_t>(i)] = lambda * lambda * interpolate_radial(g, f, lambda * g.rho_node(i));
  return out;
}

bool positive_and_decreasing(const RealField& f, double floor_rel) {
  if (f.empty()) return false;
  double mx = 0.0;
  for (double v : f) mx = std::max(mx, v);
  if (!(f.front() > 0.0)) return false;
  for (std::size_t j = 0; j + 1 < f.size(); ++j) {
    if (f[j] < floor_rel * mx) break;  // round-off tail near the outer boundary
    if (!(f[j + 1] < f[j])) return false;
  }
  for (double v : f)
    if (v < -floor_rel * mx) return false;
  return true;
}

namespace {

struct Residuals {
  double r1 = 0.0, r2 = 0.0;
  double max() const { return std::max(r1, r2); }
};

// Axis-level residual vectors F1 = (K+W)p - 2W pq, F2 = (kK+2W)q - W p^2 (not divided by W).
void residual_vectors(const Axis& ax, double kappa, const RealField& p, const RealField& q, RealField& f1, RealField& f2) {
  const int n = ax.size();
  const auto& w = ax.weights();
  f1.assign(static_cast<std::size_t>(n), 0.0);
  f2.assign(static_cast<std::size_t>(n), 0.0);
  RealField kp(static_cast<std::size_t>(n)), kq(static_cast<std::size_t>(n));
  ax.stiffness_apply(p.data(), 1, kp.data(), 1);
  ax.stiffness_apply(q.data(), 1, kq.data(), 1);
  for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
    f1[j] = kp[j] + w[j] * (p[j] - 2.0 * p[j] * q[j]);
    f2[j] = kappa * kq[j] + w[j] * (2.0 * q[j] - p[j] * p[j]);
  }
}

Residuals residual_norms(const SymmetryGrid& g, double kappa, const RealField& p, const RealField& q) {
  RealField f1, f2;
  residual_vectors(g.rho(), kappa, p, q, f1, f2);
  const auto& w = g.rho().weights();
  Residuals r;
  for (std::size_t j = 0; j < f1.size(); ++j) {
    r.r1 += f1[j] * f1[j] / w[j];
    r.r2 += f2[j] * f2[j] / w[j];
  }
  r.r1 = std::sqrt(r.r1 * g.area_factor());
  r.r2 = std::sqrt(r.r2 * g.area_factor());
  return r;
}

BandedLU<double> factor_operator(const Axis& ax, double ck, double cw) {
  const int n = ax.size(), bw = ax.half_bandwidth();
  BandedLU<double> lu(n, bw, bw);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - bw); j <= std::min(n - 1, i + bw); ++j) lu.at(i, j) = ck * ax.stiffness(i, j);
  for (int i = 0; i < n; ++i) lu.at(i, i) += cw * ax.weights()[static_cast<std::size_t>(i)];
  lu.factorize();
  return lu;
}

void fill_functionals(GroundStatePair& gs) {
  SystemState s = gs.standing_wave(0.0);
  const FunctionalReport r = evaluate_functionals(s);
  gs.mass = r.mass;
  gs.kinetic = r.kinetic;
  gs.potential = r.potential;
  gs.energy = r.energy;
  gs.action = gs.d <= 5 ? r.energy + 0.5 * r.mass : 0.0;
}

}  // namespace

double ground_state_residual(const SymmetryGrid& g, double kappa, const RealField& phi, const RealField& psi) {
  if (!g.is_radial()) throw Error("ground states live on radial grids");
  require_size(g, phi.size());
  require_size(g, psi.size());
  return residual_norms(g, kappa, phi, psi).max();
}

GroundStatePair solve_ground_state(int d, double kappa, GridPtr grid, const GroundStateOptions& opt) {
  if (d != 4 && d != 5) throw Error("solve_ground_state: d must be 4 or 5");
  if (!(kappa > 0.0)) throw Error("solve_ground_state: kappa must be positive");
  if (!grid || !grid->is_radial() || grid->dim() != d) throw Error("solve_ground_state: needs a radial grid of matching dimension");
  const Axis& ax = grid->rho();
  const int n = ax.size();
  const auto& w = ax.weights();
  const auto nn = static_cast<std::size_t>(n);

  RealField p(nn), q(nn);
  if (opt.seed) {
    std::mt19937_64 rng(*opt.seed);
    std::uniform_real_distribution<double> amp(1.0, 5.0), wid(0.6, 1.6), bump(0.0, 0.3);
    const double a1 = amp(rng), a2 = amp(rng), s1 = wid(rng), s2 = wid(rng), b1 = bump(rng), b2 = bump(rng);
    for (std::size_t j = 0; j < nn; ++j) {
      const double r = ax.nodes()[j];
      p[j] = a1 * std::exp(-r * r / (s1 * s1)) * (1.0 + b1 * std::exp(-r));
      q[j] = a2 * std::exp(-r * r / (s2 * s2)) * (1.0 + b2 * std::exp(-2.0 * r));
    }
  } else {
    for (std::size_t j = 0; j < nn; ++j) {
      const double r = ax.nodes()[j];
      p[j] = q[j] = opt.amplitude * std::exp(-r * r);
    }
  }

  const BandedLU<double> l1 = factor_operator(ax, 1.0, 1.0);
  const BandedLU<double> l2 = factor_operator(ax, kappa, 2.0);

  // Averaged Petviashvili: the plain map has a neutral -1 mode along the scaling direction.
  constexpr double newton_switch = 1e-7;
  int it = 0;
  double change = 1.0;
  RealField n1(nn), n2(nn), lp(nn), lq(nn);
  for (; it < opt.max_iter; ++it) {
    ax.stiffness_apply(p.data(), 1, lp.data(), 1);
    ax.stiffness_apply(q.data(), 1, lq.data(), 1);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < nn; ++j) {
      n1[j] = w[j] * 2.0 * p[j] * q[j];
      n2[j] = w[j] * p[j] * p[j];
      num += p[j] * (lp[j] + w[j] * p[j]) + q[j] * (kappa * lq[j] + 2.0 * w[j] * q[j]);
      den += p[j] * n1[j] + q[j] * n2[j];
    }
    if (!(den > 0.0)) throw Error("solve_ground_state: iteration collapsed to zero");
    const double mf = num / den;
    l1.solve(n1.data());
    l2.solve(n2.data());
    double dmax = 0.0, pmax = 0.0;
    for (std::size_t j = 0; j < nn; ++j) {
      const double pn = 0.5 * p[j] + 0.5 * mf * mf * n1[j];
      const double qn = 0.5 * q[j] + 0.5 * mf * mf * n2[j];
      dmax = std::max({dmax, std::abs(pn - p[j]), std::abs(qn - q[j])});
      pmax = std::max({pmax, std::abs(pn), std::abs(qn)});
      p[j] = pn;
      q[j] = qn;
    }
    change = dmax / pmax;
    if (!std::isfinite(change)) throw Error("solve_ground_state: iteration diverged");
    if (change < newton_switch) break;
  }
  if (change >= newton_switch) {
    throw Error("solve_ground_state: no convergence after " + std::to_string(opt.max_iter) +
                " iterations (last residual " + std::to_string(residual_norms(*grid, kappa, p, q).max()) + ")");
  }

  // Damped Newton polish on the interleaved system (phi_j at 2j, psi_j at 2j+1).
  const int bw = ax.half_bandwidth();
  double res = residual_norms(*grid, kappa, p, q).max();
  for (int s = 0; s < opt.newton_steps; ++s) {
    BandedLU<double> jac(2 * n, 2 * bw, 2 * bw);
    for (int i = 0; i < n; ++i) {
      for (int j = std::max(0, i - bw); j <= std::min(n - 1, i + bw); ++j) {
        jac.at(2 * i, 2 * j) = ax.stiffness(i, j);
        jac.at(2 * i + 1, 2 * j + 1) = kappa * ax.stiffness(i, j);
      }
      const auto ui = static_cast<std::size_t>(i);
      jac.at(2 * i, 2 * i) += w[ui] * (1.0 - 2.0 * q[ui]);
      jac.at(2 * i, 2 * i + 1) = -2.0 * w[ui] * p[ui];
      jac.at(2 * i + 1, 2 * i) = -2.0 * w[ui] * p[ui];
      jac.at(2 * i + 1, 2 * i + 1) += 2.0 * w[ui];
    }
    jac.factorize();
    RealField f1, f2;
    residual_vectors(ax, kappa, p, q, f1, f2);
    RealField rhs(2 * nn);
    for (std::size_t j = 0; j < nn; ++j) {
      rhs[2 * j] = -f1[j];
      rhs[2 * j + 1] = -f2[j];
    }
    jac.solve(rhs.data());
    double step = 1.0;
    bool accepted = false;
    for (int k = 0; k < 6 && !accepted; ++k, step *= 0.5) {
      RealField pt(p), qt(q);
      for (std::size_t j = 0; j < nn; ++j) {
        pt[j] += step * rhs[2 * j];
        qt[j] += step * rhs[2 * j + 1];
      }
      const double rt = residual_norms(*grid, kappa, pt, qt).max();
      if (rt < res) {
        p.swap(pt);
        q.swap(qt);
        res = rt;
        accepted = true;
      }
    }
    if (!accepted) break;  // already at round-off
  }

  if (!(res < opt.tol))
    throw Error("solve_ground_state: residual " + std::to_string(res) + " above tolerance " + std::to_string(opt.tol));

  GroundStatePair gs;
  gs.grid = grid;
  gs.phi = std::move(p);
  gs.psi = std::move(q);
  gs.kappa = kappa;
  gs.d = d;
  gs.residual_norm = res;
  gs.iterations = it + 1;
  gs.method = "petviashvili";
  fill_functionals(gs);
  return gs;
}

// ---------------------------------------------------------------------------------------------
// Shooting oracle

namespace {

struct Shot {
  std::vector<double> phi, dphi, psi, dpsi;
  std::array<double, 4> end{};
  int first_event = 0;  ///< 1: phi crossed zero first, 2: phi turned upward first, 0: neither
  bool overflow = false;
};

struct ShootSetup {
  int d;
  double kappa;
  double h;
  int steps;  ///< mesh points r_i = i h, i = 0..steps
};

// State layout: (phi, phi', psi, psi') followed by the same four for d/da and d/db.
Shot integrate(const ShootSetup& s, double a, double b, bool record, std::array<double, 12>* tangent = nullptr) {
  const double dm1 = s.d - 1.0;
  const int nc = tangent ? 12 : 4;
  auto rhs = [&](double r, const double* y, double* dy) {
    dy[0] = y[1];
    dy[1] = y[0] - 2.0 * y[0] * y[2] - dm1 / r * y[1];
    dy[2] = y[3];
    dy[3] = (2.0 * y[2] - y[0] * y[0]) / s.kappa - dm1 / r * y[3];
    for (int o = 4; o < nc; o += 4) {
      dy[o] = y[o + 1];
      dy[o + 1] = y[o] - 2.0 * (y[o] * y[2] + y[0] * y[o + 2]) - dm1 / r * y[o + 1];
      dy[o + 2] = y[o + 3];
      dy[o + 3] = (2.0 * y[o + 2] - 2.0 * y[0] * y[o]) / s.kappa - dm1 / r * y[o + 3];
    }
  };
  Shot out;
  const auto np = static_cast<std::size_t>(s.steps + 1);
  if (record) {
    out.phi.assign(np, 0.0);
    out.dphi.assign(np, 0.0);
    out.psi.assign(np, 0.0);
    out.dpsi.assign(np, 0.0);
    out.phi[0] = a;
    out.psi[0] = b;
  }
  // Series start: phi = a + c1 r^2/2, psi = b + c2 r^2/2 with c1 = (a - 2ab)/d, c2 = (2b - a^2)/(kappa d).
  const double h = s.h, dd = s.d, k = s.kappa;
  const double c1 = (a - 2.0 * a * b) / dd, c2 = (2.0 * b - a * a) / (k * dd);
  double y[12] = {a + 0.5 * c1 * h * h, c1 * h, b + 0.5 * c2 * h * h, c2 * h,
                  1.0 + 0.5 * (1.0 - 2.0 * b) / dd * h * h, (1.0 - 2.0 * b) / dd * h, -a / (k * dd) * h * h, -2.0 * a / (k * dd) * h,
                  -a / dd * h * h, -2.0 * a / dd * h, 1.0 + h * h / (k * dd), 2.0 / (k * dd) * h};
  auto store = [&](int i) {
    if (!record) return;
    const auto j = static_cast<std::size_t>(i);
    out.phi[j] = y[0];
    out.dphi[j] = y[1];
    out.psi[j] = y[2];
    out.dpsi[j] = y[3];
  };
  store(1);
  double k1[12], k2[12], k3[12], k4[12], t[12];
  bool finite = true;
  for (int i = 1; i < s.steps; ++i) {
    const double r = i * h;
    rhs(r, y, k1);
    for (int c = 0; c < nc; ++c) t[c] = y[c] + 0.5 * h * k1[c];
    rhs(r + 0.5 * h, t, k2);
    for (int c = 0; c < nc; ++c) t[c] = y[c] + 0.5 * h * k2[c];
    rhs(r + 0.5 * h, t, k3);
    for (int c = 0; c < nc; ++c) t[c] = y[c] + h * k3[c];
    rhs(r + h, t, k4);
    for (int c = 0; c < nc; ++c) y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    if (out.first_event == 0 && y[0] < 0.0) out.first_event = 1;
    if (out.first_event == 0 && y[0] > 0.0 && y[1] > 0.0) out.first_event = 2;
    if (!std::isfinite(y[0]) || std::abs(y[0]) > 1e100) {
      finite = false;
      break;
    }
    store(i + 1);
  }
  out.overflow = !finite;
  out.end = {y[0], y[1], y[2], y[3]};
  if (tangent) std::copy(y, y + 12, tangent->begin());
  return out;
}

// Decay conditions at r_end: no component along the growing modes e^{r}, e^{sqrt(2/kappa) r}.
struct Mismatch {
  std::array<double, 2> f;
  std::array<double, 4> jac;  // row-major d(f0,f1)/d(a,b)
  bool ok;
};

Mismatch mismatch(const ShootSetup& s, double a, double b) {
  std::array<double, 12> y{};
  const Shot sh = integrate(s, a, b, false, &y);
  const double L = s.h * s.steps;
  const double l1 = 1.0 + (s.d - 1.0) / (2.0 * L);
  const double l2 = std::sqrt(2.0 / s.kappa) + (s.d - 1.0) / (2.0 * L);
  Mismatch m;
  m.ok = !sh.overflow;
  m.f = {y[1] + l1 * y[0], y[3] + l2 * y[2]};
  m.jac = {y[5] + l1 * y[4], y[9] + l1 * y[8], y[7] + l2 * y[6], y[11] + l2 * y[10]};
  return m;
}

double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;  // even by construction
  double acc = f.front() + f.back();
  for (std::size_t i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f[i];
  return acc * h / 3.0;
}

}  // namespace

ShootingResult shooting_oracle(int d, double kappa, double tol) {
  if (d != 4 && d != 5) throw Error("shooting_oracle: d must be 4 or 5");
  if (!(kappa > 0.0)) throw Error("shooting_oracle: kappa must be positive");
  // Decay rate of psi is min(2, sqrt(2/kappa)); keep e^{-rate L} tiny.
  const double rate = std::min(1.0, std::sqrt(2.0 / kappa));
  const double L = std::min(30.0, 14.0 / rate);
  ShootSetup s{d, 2.0, 1e-3, 0};
  s.steps = 2 * static_cast<int>(std::lround(L / s.h / 2.0));

  // Scalar problem at kappa = 2: phi = Q, psi = Q/2 with -Delta Q + Q = Q^2.
  auto overshoots = [&](double a) { return integrate(s, a, 0.5 * a, false).first_event == 1; };
  double lo = 1.0, hi = 2.0;
  while (!overshoots(hi)) {
    lo = hi;
    hi *= 1.5;
    if (hi > 1e5) throw Error("shooting_oracle: no overshooting bracket found");
  }
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (overshoots(mid) ? hi : lo) = mid;
  }
  double a = 0.5 * (lo + hi), b = 0.5 * a;

  // Newton continuation in log kappa.
  auto newton = [&](const ShootSetup& st, double& aa, double& bb, int& iters) -> bool {
    for (int k = 0; k < 40; ++k) {
      const Mismatch m = mismatch(st, aa, bb);
      if (!m.ok) return false;
      const auto& j = m.jac;
      const double det = j[0] * j[3] - j[1] * j[2];
      if (!std::isfinite(det) || det == 0.0) return false;
      const double sa = -(j[3] * m.f[0] - j[1] * m.f[1]) / det;
      const double sb = -(-j[2] * m.f[0] + j[0] * m.f[1]) / det;
      const double fn = std::hypot(m.f[0], m.f[1]);
      double lam = 1.0;
      for (; lam > 1e-4; lam *= 0.5) {
        if (aa + lam * sa <= 0.0 || bb + lam * sb <= 0.0) continue;
        const Mismatch t = mismatch(st, aa + lam * sa, bb + lam * sb);
        if (t.ok && std::hypot(t.f[0], t.f[1]) < fn) break;
      }
      if (lam <= 1e-4) {
        // No decrease: accept only if already at round-off.
        return std::abs(sa) < 1e-8 * aa && std::abs(sb) < 1e-8 * bb;
      }
      aa += lam * sa;
      bb += lam * sb;
      ++iters;
      if (std::abs(lam * sa) < 1e-13 * aa && std::abs(lam * sb) < 1e-13 * bb) return true;
    }
    return false;
  };

  // Continuation runs on a short interval where the growing modes stay moderate; the
  // interval is then lengthened in stages, each seeded by the previous solution.
  int iters = 0;
  const double target = std::log(kappa);
  double lk = std::log(2.0);
  double dl = 0.05;
  ShootSetup cur = s;
  cur.steps = 2 * static_cast<int>(std::lround(6.0 / s.h / 2.0));
  if (!newton(cur, a, b, iters)) throw Error("shooting_oracle: Newton failed at kappa = 2");
  while (lk != target) {
    const double step = std::copysign(std::min(dl, std::abs(target - lk)), target - lk);
    ShootSetup trial = cur;
    const double next = std::abs(target - lk - step) < 1e-14 ? target : lk + step;
    trial.kappa = next == target ? kappa : std::exp(next);
    // Predictor: d(a, b)/dkappa = -J^{-1} dF/dkappa at the current solution.
    double ta = a, tb = b;
    {
      const Mismatch m0 = mismatch(cur, a, b);
      ShootSetup bumped = cur;
      const double dk = 1e-6 * cur.kappa;
      bumped.kappa += dk;
      const Mismatch m1 = mismatch(bumped, a, b);
      const auto& j = m0.jac;
      const double det = j[0] * j[3] - j[1] * j[2];
      if (m0.ok && m1.ok && det != 0.0) {
        const double g0 = (m1.f[0] - m0.f[0]) / dk, g1 = (m1.f[1] - m0.f[1]) / dk;
        const double da = -(j[3] * g0 - j[1] * g1) / det, db = -(-j[2] * g0 + j[0] * g1) / det;
        const double dkap = trial.kappa - cur.kappa;
        ta += da * dkap;
        tb += db * dkap;
      }
    }
    if (newton(trial, ta, tb, iters)) {
      a = ta;
      b = tb;
      lk = next;
      cur = trial;
      dl = std::min(0.1, dl * 1.5);
    } else {
      dl *= 0.5;
      if (dl < 1e-4) throw Error("shooting_oracle: continuation stalled");
    }
  }
  // Extend until the central values are stationary; beyond that the growing modes only add round-off.
  s.kappa = kappa;
  for (double len = 7.0; len <= L; len += 1.0) {
    ShootSetup st = s;
    st.steps = 2 * static_cast<int>(std::lround(len / s.h / 2.0));
    double ta = a, tb = b;
    if (!newton(st, ta, tb, iters)) throw Error("shooting_oracle: Newton failed while extending the interval");
    const double change = std::max(std::abs(ta - a) / a, std::abs(tb - b) / b);
    a = ta;
    b = tb;
    s.steps = st.steps;
    if (change < 1e-9) break;
  }

  const Shot sh = integrate(s, a, b, true);
  ShootingResult res;
  res.d = d;
  res.kappa = kappa;
  res.phi0 = a;
  res.psi0 = b;
  res.r_end = s.h * s.steps;
  res.newton_iterations = iters;
  const std::size_t np = sh.phi.size();
  if (sh.overflow) throw Error("shooting_oracle: final integration overflowed");
  res.r.resize(np);
  std::vector<double> fm(np), ft(np), fp(np);
  for (std::size_t i = 0; i < np; ++i) {
    const double r = static_cast<double>(i) * s.h;
    res.r[i] = r;
    const double rw = std::pow(r, d - 1.0);
    fm[i] = rw * (sh.phi[i] * sh.phi[i] + 2.0 * sh.psi[i] * sh.psi[i]);
    ft[i] = rw * (sh.dphi[i] * sh.dphi[i] + kappa * sh.dpsi[i] * sh.dpsi[i]);
    fp[i] = rw * sh.psi[i] * sh.phi[i] * sh.phi[i];
  }
  const double area = sphere_area(d - 1);
  res.mass = area * simpson(fm, s.h);
  res.kinetic = area * simpson(ft, s.h);
  res.potential = area * simpson(fp, s.h);
  res.phi = sh.phi;
  res.psi = sh.psi;

  // Plug-back residual with independent five-point differences.
  double worst = 0.0;
  const double h = s.h;
  for (std::size_t i = 2; i + 2 < np; ++i) {
    const double r = res.r[i];
    auto d1 = [&](const std::vector<double>& f) { return (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h); };
    auto d2 = [&](const std::vector<double>& f) {
      return (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / (12.0 * h * h);
    };
    const double e1 = d2(res.phi) + (d - 1.0) / r * d1(res.phi) - res.phi[i] + 2.0 * res.phi[i] * res.psi[i];
    const double e2 = kappa * (d2(res.psi) + (d - 1.0) / r * d1(res.psi)) - 2.0 * res.psi[i] + res.phi[i] * res.phi[i];
    worst = std::max({worst, std::abs(e1), std::abs(e2)});
  }
  res.ode_residual = worst / a;
  // The decay condition is asymptotic, so the last unit of radius is excluded from the shape check.
  const auto inner = static_cast<std::ptrdiff_t>(std::lround((res.r_end - 1.0) / s.h));
  res.monotone = positive_and_decreasing(RealField(res.phi.begin(), res.phi.begin() + inner), 1e-12) &&
                 positive_and_decreasing(RealField(res.psi.begin(), res.psi.begin() + inner), 1e-12);
  if (!(res.ode_residual < tol)) throw Error("shooting_oracle: plug-back residual " + std::to_string(res.ode_residual) + " above tolerance");
  return res;
}

GroundStatePair shooting_pair(const ShootingResult& s, GridPtr grid) {
  if (!grid || !grid->is_radial() || grid->dim() != s.d) throw Error("shooting_pair: grid mismatch");
  GroundStatePair gs;
  gs.grid = grid;
  gs.kappa = s.kappa;
  gs.d = s.d;
  gs.method = "shooting";
  gs.iterations = s.newton_iterations;
  const double h = s.r[1] - s.r[0];
  auto lin = [&](const std::vector<double>& f, double r) {
    const double x = r / h;
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= f.size()) return 0.0;
    const double t = x - static_cast<double>(i);
    return (1.0 - t) * f[i] + t * f[i + 1];
  };
  gs.phi.resize(grid->size());
  gs.psi.resize(grid->size());
  for (int i = 0; i < grid->n_rho(); ++i) {
    gs.phi[static_cast<std::size_t>(i)] = lin(s.phi, grid->rho_node(i));
    gs.psi[static_cast<std::size_t>(i)] = lin(s.psi, grid->rho_node(i));
  }
  gs.mass = s.mass;
  gs.kinetic = s.kinetic;
  gs.potential = s.potential;
  gs.energy = 0.5 * s.kinetic - s.potential;
  gs.action = gs.energy + 0.5 * gs.mass;
  gs.residual_norm = ground_state_residual(*grid, s.kappa, gs.phi, gs.psi);
  return gs;
}

// ---------------------------------------------------------------------------------------------
// Explicit d = 6 pair

namespace {

// Tails beyond L of the r^5-weighted integrals of U = 24/(1+r^2)^2; S = 1 + L^2.
double tail_u2(double L) {
  const double s = 1.0 + L * L;
  return 288.0 * (1.0 / s - 1.0 / (s * s) + 1.0 / (3.0 * s * s * s));
}
double tail_du2(double L) {
  const double s = 1.0 + L * L, s2 = s * s;
  return 4608.0 * (0.5 / s2 - 1.0 / (s2 * s) + 0.75 / (s2 * s2) - 0.2 / (s2 * s2 * s));
}
double tail_u3(double L) {
  const double s = 1.0 + L * L, s3 = s * s * s;
  return 6912.0 * (1.0 / (3.0 * s3) - 0.5 / (s3 * s) + 0.2 / (s3 * s * s));
}

double u6(double r) {
  const double s = 1.0 + r * r;
  return 24.0 / (s * s);
}

}  // namespace

double explicit_6d_residual(double kappa, const SymmetryGrid& g) {
  if (!g.is_radial() || g.dim() != 6) throw Error("explicit pair needs a d = 6 radial grid");
  const GridPtr ext = g.extended(8);
  const double c = std::sqrt(0.5 * kappa);
  const RealField phi = sample(*ext, [&](double r, double) { return c * u6(r); });
  const RealField psi = sample(*ext, [&](double r, double) { return 0.5 * u6(r); });
  const RealField lp = apply_laplacian(*ext, phi), lq = apply_laplacian(*ext, psi);
  const auto& w = g.weights();
  double r1 = 0.0, r2 = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double e1 = -lp[j] - 2.0 * phi[j] * psi[j];
    const double e2 = -kappa * lq[j] - phi[j] * phi[j];
    r1 += w[j] * e1 * e1;
    r2 += w[j] * e2 * e2;
  }
  return std::sqrt(std::max(r1, r2));
}

GroundStatePair explicit_static_6d(double kappa, GridPtr grid) {
  if (!(kappa > 0.0)) throw Error("explicit_static_6d: kappa must be positive");
  if (!grid || !grid->is_radial() || grid->dim() != 6) throw Error("explicit_static_6d: needs a d = 6 radial grid");
  const double c = std::sqrt(0.5 * kappa);
  GroundStatePair gs;
  gs.grid = grid;
  gs.kappa = kappa;
  gs.d = 6;
  gs.method = "explicit";
  gs.phi = sample(*grid, [&](double r, double) { return c * u6(r); });
  gs.psi = sample(*grid, [&](double r, double) { return 0.5 * u6(r); });

  const double L = grid->rho().extent();
  const double area = grid->area_factor();
  const auto& w = grid->weights();
  double m = 0.0, p = 0.0;
  for (std::size_t j = 0; j < grid->size(); ++j) {
    m += w[j] * (gs.phi[j] * gs.phi[j] + 2.0 * gs.psi[j] * gs.psi[j]);
    p += w[j] * gs.psi[j] * gs.phi[j] * gs.phi[j];
  }
  // phi^2 + 2 psi^2 = (kappa + 1)/2 U^2, psi phi^2 = kappa/4 U^3, |phi'|^2 + kappa|psi'|^2 = 3 kappa/4 U'^2.
  gs.mass = m + area * 0.5 * (kappa + 1.0) * tail_u2(L);
  gs.potential = p + area * 0.25 * kappa * tail_u3(L);

  // Face sum on an extended grid so the Dirichlet closure does not truncate the slow tail;
  // the face at r_max straddles the cut, so only half of it is kept.
  const GridPtr ext = grid->extended(8);
  const RealField pe = sample(*ext, [&](double r, double) { return c * u6(r); });
  const RealField qe = sample(*ext, [&](double r, double) { return 0.5 * u6(r); });
  std::vector<double> ff(static_cast<std::size_t>(ext->rho().face_count()), 0.0);
  const int n = grid->n_rho();
  for (int q = 0; q < n; ++q) ff[static_cast<std::size_t>(q)] = q == n - 1 ? 0.5 : 1.0;
  gs.kinetic = gradient_rho(*ext, pe, ff) + kappa * gradient_rho(*ext, qe, ff) + area * 0.75 * kappa * tail_du2(L);
  gs.energy = 0.5 * gs.kinetic - gs.potential;
  gs.residual_norm = explicit_6d_residual(kappa, *grid);
  return gs;
}

}  // namespace qnls
