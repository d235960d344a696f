#include "qnls/gqnls.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace qnls::gq {

// ---------------------------------------------------------------- polynomials

void Polynomial::add(const Exponents& pq, cplx c) {
  if (static_cast<int>(pq.size()) != 2 * n_) throw Error("Polynomial: exponent vector has the wrong length");
  for (int e : pq)
    if (e < 0) throw Error("Polynomial: negative exponent");
  if (c == cplx(0.0)) return;
  auto it = terms_.find(pq);
  if (it == terms_.end()) {
    terms_.emplace(pq, c);
    return;
  }
  it->second += c;
  if (it->second == cplx(0.0)) terms_.erase(it);
}

void Polynomial::add(const std::vector<int>& p, const std::vector<int>& q, cplx c) {
  if (static_cast<int>(p.size()) != n_ || static_cast<int>(q.size()) != n_) throw Error("Polynomial: exponent vector has the wrong length");
  Exponents pq(p);
  pq.insert(pq.end(), q.begin(), q.end());
  add(pq, c);
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (o.n_ != n_) throw Error("Polynomial: variable count mismatch");
  Polynomial r = *this;
  for (const auto& [k, c] : o.terms_) r.add(k, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o.scaled(-1.0); }

Polynomial Polynomial::scaled(cplx c) const {
  Polynomial r(n_);
  for (const auto& [k, v] : terms_) r.add(k, v * c);
  return r;
}

Polynomial Polynomial::conjugate() const {
  Polynomial r(n_);
  for (const auto& [k, v] : terms_) {
    Exponents sw(k.begin() + n_, k.end());
    sw.insert(sw.end(), k.begin(), k.begin() + n_);
    r.add(sw, std::conj(v));
  }
  return r;
}

namespace {

Polynomial differentiate(const Polynomial& P, int slot) {
  Polynomial r(P.variables());
  for (const auto& [k, v] : P.terms()) {
    const int e = k[static_cast<std::size_t>(slot)];
    if (e == 0) continue;
    Exponents kk = k;
    kk[static_cast<std::size_t>(slot)] = e - 1;
    r.add(kk, v * static_cast<double>(e));
  }
  return r;
}

Polynomial multiply(const Polynomial& P, int slot) {
  Polynomial r(P.variables());
  for (const auto& [k, v] : P.terms()) {
    Exponents kk = k;
    ++kk[static_cast<std::size_t>(slot)];
    r.add(kk, v);
  }
  return r;
}

void check_var(const Polynomial& P, int j) {
  if (j < 0 || j >= P.variables()) throw Error("Polynomial: variable index out of range");
}

}  // namespace

Polynomial Polynomial::d_z(int j) const {
  check_var(*this, j);
  return differentiate(*this, j);
}
Polynomial Polynomial::d_zbar(int j) const {
  check_var(*this, j);
  return differentiate(*this, n_ + j);
}
Polynomial Polynomial::times_z(int j) const {
  check_var(*this, j);
  return multiply(*this, j);
}
Polynomial Polynomial::times_zbar(int j) const {
  check_var(*this, j);
  return multiply(*this, n_ + j);
}

int Polynomial::homogeneous_degree() const {
  int deg = -2;
  for (const auto& [k, v] : terms_) {
    int s = 0;
    for (int e : k) s += e;
    if (deg == -2) deg = s;
    else if (deg != s) return -1;
  }
  return deg == -2 ? 0 : deg;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [k, v] : terms_) m = std::max(m, std::abs(v));
  return m;
}

bool Polynomial::vanishes(double tol) const {
  for (const auto& [k, v] : terms_)
    if (std::abs(v) > tol) return false;
  return true;
}

cplx Polynomial::evaluate(const cplx* z) const {
  cplx acc(0.0);
  for (const auto& [k, v] : terms_) {
    cplx m = v;
    for (int j = 0; j < n_; ++j) {
      for (int e = 0; e < k[static_cast<std::size_t>(j)]; ++e) m *= z[j];
      for (int e = 0; e < k[static_cast<std::size_t>(n_ + j)]; ++e) m *= std::conj(z[j]);
    }
    acc += m;
  }
  return acc;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [k, v] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i)";
    for (int j = 0; j < n_; ++j) {
      if (k[static_cast<std::size_t>(j)] > 0) os << " z" << j + 1 << "^" << k[static_cast<std::size_t>(j)];
      if (k[static_cast<std::size_t>(n_ + j)] > 0) os << " zb" << j + 1 << "^" << k[static_cast<std::size_t>(n_ + j)];
    }
  }
  return os.str();
}

std::vector<Polynomial> derive_fj(const Polynomial& F) {
  const int deg = F.homogeneous_degree();
  if (!F.empty() && deg != 3) throw Error("derive_fj: F must be a homogeneous cubic in (z, conj z)");
  std::vector<Polynomial> f;
  for (int j = 0; j < F.variables(); ++j) f.push_back(F.d_zbar(j) + F.d_z(j).conjugate());
  return f;
}

namespace {

// 2i Im(f_j conj z_j) as a polynomial.
Polynomial im_pairing(const Polynomial& fj, int j) {
  const Polynomial p = fj.times_zbar(j);
  return p - p.conjugate();
}

// Null space of a real matrix (rows x cols) by reduced row echelon form.
std::vector<std::vector<double>> null_space(std::vector<std::vector<double>> A, int cols, double tol) {
  const int rows = static_cast<int>(A.size());
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int best = r;
    for (int i = r + 1; i < rows; ++i)
      if (std::abs(A[i][c]) > std::abs(A[best][c])) best = i;
    if (std::abs(A[best][c]) <= tol) continue;
    std::swap(A[r], A[best]);
    const double p = A[r][c];
    for (double& x : A[r]) x /= p;
    for (int i = 0; i < rows; ++i) {
      if (i == r || A[i][c] == 0.0) continue;
      const double m = A[i][c];
      for (int k = 0; k < cols; ++k) A[i][k] -= m * A[r][k];
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<std::vector<double>> basis;
  for (int free = 0; free < cols; ++free) {
    if (std::find(pivot_col.begin(), pivot_col.end(), free) != pivot_col.end()) continue;
    std::vector<double> v(static_cast<std::size_t>(cols), 0.0);
    v[static_cast<std::size_t>(free)] = 1.0;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) v[static_cast<std::size_t>(pivot_col[i])] = -A[i][static_cast<std::size_t>(free)];
    basis.push_back(std::move(v));
  }
  return basis;
}

bool strictly_positive(std::vector<double>& v, double tol) {
  double mx = 0.0;
  for (double x : v) mx = std::abs(x) > std::abs(mx) ? x : mx;
  if (mx == 0.0) return false;
  for (double& x : v) x /= mx;
  for (double x : v)
    if (!(x > tol)) return false;
  const double mn = *std::min_element(v.begin(), v.end());
  for (double& x : v) x /= mn;
  return true;
}

}  // namespace

std::vector<double> solve_mass_weights(const std::vector<Polynomial>& f, double tol) {
  const int n = static_cast<int>(f.size());
  if (n == 0) throw Error("solve_mass_weights: no components");
  std::vector<Polynomial> q;
  std::map<Exponents, int> keys;
  double scale = 0.0;
  for (int j = 0; j < n; ++j) {
    q.push_back(im_pairing(f[static_cast<std::size_t>(j)], j));
    for (const auto& [k, v] : q.back().terms()) keys.emplace(k, 0);
    scale = std::max(scale, q.back().max_abs_coefficient());
  }
  if (keys.empty()) return std::vector<double>(static_cast<std::size_t>(n), 1.0);
  int row = 0;
  for (auto& [k, idx] : keys) idx = row++;
  std::vector<std::vector<double>> A(static_cast<std::size_t>(2 * row), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int j = 0; j < n; ++j) {
    for (const auto& [k, v] : q[static_cast<std::size_t>(j)].terms()) {
      const int i = keys.at(k);
      A[static_cast<std::size_t>(2 * i)][static_cast<std::size_t>(j)] = v.real();
      A[static_cast<std::size_t>(2 * i + 1)][static_cast<std::size_t>(j)] = v.imag();
    }
  }
  auto basis = null_space(A, n, tol * scale);
  if (basis.empty()) throw Error("solve_mass_weights: no nonzero weights conserve the mass");
  // Single direction: fix the sign. Several: try the projection of the all-ones vector, then each basis vector.
  if (basis.size() == 1) {
    if (strictly_positive(basis[0], tol)) return basis[0];
    throw Error("solve_mass_weights: the conserving weights are not all positive");
  }
  std::vector<std::vector<double>> ortho;
  for (auto v : basis) {
    for (const auto& o : ortho) {
      double d = 0.0;
      for (int k = 0; k < n; ++k) d += v[static_cast<std::size_t>(k)] * o[static_cast<std::size_t>(k)];
      for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] -= d * o[static_cast<std::size_t>(k)];
    }
    double nn = 0.0;
    for (double x : v) nn += x * x;
    nn = std::sqrt(nn);
    for (double& x : v) x /= nn;
    ortho.push_back(std::move(v));
  }
  std::vector<double> proj(static_cast<std::size_t>(n), 0.0);
  for (const auto& o : ortho) {
    double d = 0.0;
    for (double x : o) d += x;
    for (int k = 0; k < n; ++k) proj[static_cast<std::size_t>(k)] += d * o[static_cast<std::size_t>(k)];
  }
  if (strictly_positive(proj, tol)) return proj;
  for (auto v : basis)
    if (strictly_positive(v, tol)) return v;
  throw Error("solve_mass_weights: no positive conserving weights found");
}

Resonance resonance_classify(const QuadraticSystemSpec& spec, double tol) {
  spec.validate();
  Resonance r;
  r.defect = Polynomial(spec.n);
  double scale = 1.0;
  for (int j = 0; j < spec.n; ++j) {
    const auto& fj = spec.f[static_cast<std::size_t>(j)];
    scale = std::max(scale, fj.max_abs_coefficient());
    r.defect = r.defect + im_pairing(fj, j).scaled(spec.a[static_cast<std::size_t>(j)] / (2.0 * spec.b[static_cast<std::size_t>(j)]));
  }
  r.mass_resonant = r.defect.vanishes(tol * scale);
  return r;
}

// ---------------------------------------------------------------- spec

void QuadraticSystemSpec::finalize() {
  if (n < 1) throw Error("QuadraticSystemSpec: need at least one component");
  if (F.variables() != n) throw Error("QuadraticSystemSpec: F has the wrong number of variables");
  f = derive_fj(F);
  if (s.empty()) s = solve_mass_weights(f);
  validate();
}

void QuadraticSystemSpec::validate() const {
  const auto N = static_cast<std::size_t>(n);
  if (n < 1) throw Error("QuadraticSystemSpec: need at least one component");
  if (a.size() != N || b.size() != N || c.size() != N) throw Error("QuadraticSystemSpec: a, b, c must have N entries");
  for (std::size_t j = 0; j < N; ++j) {
    if (!(a[j] > 0.0)) throw Error("QuadraticSystemSpec: a_j must be positive");
    if (!(b[j] > 0.0)) throw Error("QuadraticSystemSpec: b_j must be positive");
    if (!(c[j] >= 0.0)) throw Error("QuadraticSystemSpec: c_j must be nonnegative");
  }
  if (F.variables() != n) throw Error("QuadraticSystemSpec: F has the wrong number of variables");
  if (!F.empty() && F.homogeneous_degree() != 3) throw Error("QuadraticSystemSpec: F must be a homogeneous cubic");
  if (f.size() != N) throw Error("QuadraticSystemSpec: f_j not derived (call finalize)");
  if (s.size() != N) throw Error("QuadraticSystemSpec: mass weights missing");
  Polynomial cons(n);
  double scale = 1.0;
  for (std::size_t j = 0; j < N; ++j) {
    if (!(s[j] > 0.0)) throw Error("QuadraticSystemSpec: mass weights must be positive");
    cons = cons + im_pairing(f[j], static_cast<int>(j)).scaled(s[j]);
    scale = std::max(scale, f[j].max_abs_coefficient() * s[j]);
  }
  if (!cons.vanishes(1e-12 * scale)) throw Error("QuadraticSystemSpec: mass weights do not conserve the mass");
}

QuadraticSystemSpec QuadraticSystemSpec::snls(double kappa) {
  if (!(kappa > 0.0)) throw Error("snls: kappa must be positive");
  QuadraticSystemSpec q;
  q.n = 2;
  q.a = {1.0, 1.0};
  q.b = {1.0, kappa};
  q.c = {0.0, 0.0};
  q.F = Polynomial(2);
  q.F.add({0, 1}, {2, 0}, 1.0);
  q.finalize();
  return q;
}

// ---------------------------------------------------------------- states and functionals

void GqState::validate(const QuadraticSystemSpec& spec) const {
  if (!grid) throw Error("GqState: null grid");
  if (u.size() != static_cast<std::size_t>(spec.n)) throw Error("GqState: component count differs from the spec");
  for (const auto& f : u) require_size(*grid, f.size());
}

GqState from_pair(const SystemState& s) {
  s.validate();
  GqState g;
  g.grid = s.grid;
  g.u = {s.u, s.v};
  g.t = s.t;
  return g;
}

SystemState to_pair(const GqState& s, double kappa) {
  if (s.u.size() != 2) throw Error("to_pair: need two components");
  SystemState p;
  p.grid = s.grid;
  p.u = s.u[0];
  p.v = s.u[1];
  p.t = s.t;
  p.kappa = kappa;
  p.validate();
  return p;
}

namespace {

// Flattened monomials for fast pointwise evaluation.
struct Factor {
  int var;
  bool conj;
};
struct FlatTerm {
  cplx c;
  std::vector<Factor> factors;
};
using FlatPoly = std::vector<FlatTerm>;

FlatPoly flatten(const Polynomial& P) {
  FlatPoly out;
  const int n = P.variables();
  for (const auto& [k, v] : P.terms()) {
    FlatTerm t{v, {}};
    for (int j = 0; j < n; ++j) {
      for (int e = 0; e < k[static_cast<std::size_t>(j)]; ++e) t.factors.push_back({j, false});
      for (int e = 0; e < k[static_cast<std::size_t>(n + j)]; ++e) t.factors.push_back({j, true});
    }
    out.push_back(std::move(t));
  }
  return out;
}

cplx eval_flat(const FlatPoly& p, const cplx* z) {
  cplx acc(0.0);
  for (const auto& t : p) {
    cplx m = t.c;
    for (const auto& f : t.factors) m *= f.conj ? std::conj(z[f.var]) : z[f.var];
    acc += m;
  }
  return acc;
}

// Re F at every node.
RealField re_F(const QuadraticSystemSpec& spec, const GqState& s) {
  const FlatPoly F = flatten(spec.F);
  const std::size_t n = s.grid->size();
  RealField out(n, 0.0);
  std::vector<cplx> z(static_cast<std::size_t>(spec.n));
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < spec.n; ++j) z[static_cast<std::size_t>(j)] = s.u[static_cast<std::size_t>(j)][i];
    out[i] = eval_flat(F, z.data()).real();
  }
  return out;
}

}  // namespace

GeneralizedReport generalized_report(const QuadraticSystemSpec& spec, const GqState& s, double omega) {
  spec.validate();
  s.validate(spec);
  const SymmetryGrid& g = *s.grid;
  GeneralizedReport r;
  r.d = g.dim();
  r.omega = omega;
  for (int j = 0; j < spec.n; ++j) {
    const auto J = static_cast<std::size_t>(j);
    const double l2 = norm2(g, s.u[J]);
    r.g_mass += 0.5 * spec.a[J] * spec.s[J] * l2;
    r.g_T += spec.b[J] * gradient_norm2(g, s.u[J]);
    r.g_Q += (0.5 * spec.a[J] * spec.s[J] * omega + spec.c[J]) * l2;
    r.g_c_mass += spec.c[J] * l2;
  }
  r.g_P = integrate(g, re_F(spec, s));
  r.g_energy = 0.5 * r.g_T + 0.5 * r.g_c_mass - r.g_P;
  return r;
}

// ---------------------------------------------------------------- virial

namespace {

struct GqAssembly {
  VirialReport rep;
  GeneralizedReport gr;
  detail::ProfileSamples ps;
};

GqAssembly gq_assemble(const QuadraticSystemSpec& spec, const GqState& s, const cutoff::CutoffProfile& p) {
  spec.validate();
  s.validate(spec);
  const SymmetryGrid& g = *s.grid;
  GqAssembly a;
  a.ps = detail::sample_profile(p, g);
  a.gr = generalized_report(spec, s);
  const RealField F = re_F(spec, s);
  const auto& w = g.weights();
  double pot = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    pot += w[i] * a.ps.lap[i] * F[i];
    tail += w[i] * a.ps.tail[i] * F[i];
  }
  double bil = 0.0, hess_rho = 0.0, hess_z = 0.0, defect = 0.0, mom = 0.0;
  for (int j = 0; j < spec.n; ++j) {
    const auto J = static_cast<std::size_t>(j);
    const auto& u = s.u[J];
    bil += spec.b[J] * flux_rho(g, u, a.ps.rho_lap_d);
    hess_rho += spec.b[J] * gradient_rho(g, u, a.ps.rho_f2);
    hess_z += spec.b[J] * gradient_z(g, u);
    defect += spec.b[J] * gradient_rho(g, u, a.ps.rho_defect);
    double m = momentum_rho(g, u, a.ps.rho_f1);
    if (!g.is_radial()) m += momentum_z(g, u, a.ps.z_f1);
    mom += spec.a[J] * m;
  }
  bil *= -2.0;  // int Delta^2 phi sum b_j |u_j|^2
  VirialReport& r = a.rep;
  r.t = s.t;
  r.m_phi = 2.0 * mom;
  r.ddt_exact = -bil + 4.0 * hess_rho + 8.0 * hess_z - 2.0 * pot;
  r.g_value = 8.0 * a.gr.g_T - 4.0 * g.dim() * a.gr.g_P;
  r.remainders.bilap = -bil;
  r.remainders.hessian_defect = 4.0 * defect;
  r.remainders.potential_tail = 2.0 * tail;
  return a;
}

std::vector<double> lemma_weights(const QuadraticSystemSpec& spec, const VirialOptions& opt) {
  if (!opt.gradient_weights) return spec.a;
  if (opt.gradient_weights->size() != static_cast<std::size_t>(spec.n)) throw Error("gradient weight override needs N entries");
  return *opt.gradient_weights;
}

void finish(VirialReport& r, double base, double shape, double c_est) {
  r.bound_base = base;
  r.bound_shape = shape;
  r.c_est = c_est;
  r.ddt_bound_rhs = base + c_est * shape;
}

}  // namespace

double gq_m_phi(const QuadraticSystemSpec& spec, const GqState& s, const cutoff::CutoffProfile& p) {
  spec.validate();
  s.validate(spec);
  const auto ps = detail::sample_profile(p, *s.grid);
  double mom = 0.0;
  for (int j = 0; j < spec.n; ++j) {
    const auto& u = s.u[static_cast<std::size_t>(j)];
    double m = momentum_rho(*s.grid, u, ps.rho_f1);
    if (!s.grid->is_radial()) m += momentum_z(*s.grid, u, ps.z_f1);
    mom += spec.a[static_cast<std::size_t>(j)] * m;
  }
  return 2.0 * mom;
}

VirialReport gq_virial_exact(const QuadraticSystemSpec& spec, const GqState& s, const cutoff::CutoffProfile& p) {
  return gq_assemble(spec, s, p).rep;
}

VirialReport gq_virial_radial_4d(const QuadraticSystemSpec& spec, const GqState& s, const cutoff::CutoffProfile& p, double c_est,
                                 const VirialOptions& opt) {
  if (!s.grid || !s.grid->is_radial() || s.grid->dim() != 4) throw Error("gq_virial_radial_4d: needs a d = 4 radial state");
  if (p.kind() != cutoff::ProfileKind::radial) throw Error("gq_virial_radial_4d: needs the radial cut-off");
  GqAssembly a = gq_assemble(spec, s, p);
  const auto w = lemma_weights(spec, opt);
  const SymmetryGrid& g = *s.grid;
  double th1 = 0.0, th2 = 0.0;
  for (int j = 0; j < spec.n; ++j) {
    const auto J = static_cast<std::size_t>(j);
    if (w[J] == 0.0) continue;
    th1 += w[J] * gradient_rho(g, s.u[J], a.ps.rho_theta1);
    th2 += w[J] * gradient_rho(g, s.u[J], a.ps.rho_theta2sq);
  }
  const double R = p.R();
  a.rep.bound = BoundKind::radial_4d;
  a.rep.tail_normalizer = th2 + 1.0;
  finish(a.rep, 16.0 * a.gr.g_energy - 4.0 * th1, 4.0 * std::pow(R, -1.5) * th2 + std::pow(R, -2.0) + std::pow(R, -1.5), c_est);
  return a.rep;
}

VirialReport gq_virial_cylindrical_4d(const QuadraticSystemSpec& spec, const GqState& s, const cutoff::CutoffProfile& p,
                                      double c_est, const VirialOptions& opt) {
  if (!s.grid || s.grid->is_radial() || s.grid->dim() != 4) throw Error("gq_virial_cylindrical_4d: needs a d = 4 cylindrical state");
  if (p.kind() != cutoff::ProfileKind::cylindrical) throw Error("gq_virial_cylindrical_4d: needs the cylindrical cut-off");
  GqAssembly a = gq_assemble(spec, s, p);
  const auto w = lemma_weights(spec, opt);
  const SymmetryGrid& g = *s.grid;
  double th1 = 0.0, th2 = 0.0, dz = 0.0;
  for (int j = 0; j < spec.n; ++j) {
    const auto J = static_cast<std::size_t>(j);
    if (w[J] == 0.0) continue;
    th1 += w[J] * gradient_rho(g, s.u[J], a.ps.rho_theta1);
    th2 += w[J] * gradient_rho(g, s.u[J], a.ps.rho_theta2sq);
    dz += w[J] * gradient_z(g, s.u[J]);
  }
  const double R = p.R();
  a.rep.bound = BoundKind::cylindrical_4d;
  a.rep.tail_normalizer = th2 + dz + 1.0;
  finish(a.rep, 16.0 * a.gr.g_energy - 4.0 * th1, 4.0 / R * th2 + dz / R + std::pow(R, -2.0) + 1.0 / R, c_est);
  return a.rep;
}

// ---------------------------------------------------------------- Gagliardo-Nirenberg

GqGroundState embed_ground_state(const GroundStatePair& gs, double omega) {
  if (!(omega > 0.0)) throw Error("embed_ground_state: omega must be positive");
  const double lambda = std::sqrt(0.5 * omega);
  GqGroundState g;
  g.grid = gs.grid;
  g.omega = omega;
  g.phi = {rescale_radial(*gs.grid, gs.phi, lambda), rescale_radial(*gs.grid, gs.psi, lambda)};
  return g;
}

namespace {

double gn_ratio_base(const GeneralizedReport& r) {
  const double d = r.d;
  return std::pow(r.g_Q, (6.0 - d) / 4.0) * std::pow(r.g_T, d / 4.0);
}

GqState real_state(const GqGroundState& gs) {
  GqState s;
  s.grid = gs.grid;
  for (const auto& f : gs.phi) s.u.emplace_back(f.begin(), f.end());
  return s;
}

}  // namespace

GnCheck gq_gn_check(const GqGroundState& gs, const QuadraticSystemSpec& spec, double omega, int samples, std::uint64_t seed, double tol) {
  spec.validate();
  if (!gs.grid || !gs.grid->is_radial() || gs.grid->dim() != 5) throw Error("gq_gn_check: needs a d = 5 radial optimizer");
  if (gs.phi.size() != static_cast<std::size_t>(spec.n)) throw Error("gq_gn_check: optimizer has the wrong component count");
  for (int j = 0; j < spec.n; ++j) {
    const auto J = static_cast<std::size_t>(j);
    if (!(0.5 * spec.a[J] * spec.s[J] * omega + spec.c[J] > 0.0)) throw Error("gq_gn_check: a_j s_j omega / 2 + c_j must be positive");
  }
  GnCheck out;
  const GeneralizedReport g0 = generalized_report(spec, real_state(gs), omega);
  out.c_opt = g0.g_P / gn_ratio_base(g0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(0.1, 3.0), width(0.5, 3.0), centre(0.0, 3.0);
  const SymmetryGrid& G = *gs.grid;
  for (int k = 0; k < samples; ++k) {
    GqState s;
    s.grid = gs.grid;
    for (int j = 0; j < spec.n; ++j) {
      const double A = amp(rng), w = width(rng), r0 = centre(rng);
      ComplexField f(G.size());
      for (int i = 0; i < G.n_rho(); ++i) {
        const double x = (G.rho_node(i) - r0) / w;
        f[static_cast<std::size_t>(i)] = A * std::exp(-x * x);
      }
      s.u.push_back(std::move(f));
    }
    const GeneralizedReport r = generalized_report(spec, s, omega);
    const double base = gn_ratio_base(r);
    if (!(base > 0.0)) continue;
    const double ratio = r.g_P / (out.c_opt * base);
    out.max_ratio = std::max(out.max_ratio, ratio);
    ++out.samples;
    if (ratio > 1.0 + tol) ++out.violations;
  }
  out.holds = out.violations == 0;
  return out;
}

GqClassification gq_classify(const GeneralizedReport& r, const GeneralizedReport& ground, int d) {
  GqClassification c;
  const double e0 = 0.5 * ground.g_T - ground.g_P;
  if (d == 5) {
    c.in_blowup_region = r.g_mass * r.g_energy < ground.g_mass * e0 && r.g_mass * r.g_T > ground.g_mass * ground.g_T;
  } else if (d == 6) {
    c.in_blowup_region = r.g_energy < e0 && r.g_T > ground.g_T;
  } else {
    throw Error("gq_classify: d must be 5 or 6");
  }
  return c;
}

// ---------------------------------------------------------------- evolution

GqIntegrator::GqIntegrator(const QuadraticSystemSpec& spec, GridPtr g, bool nonlinear)
    : spec_(spec), g_(std::move(g)), nonlinear_(nonlinear), cache_(static_cast<std::size_t>(spec.n)) {
  spec_.validate();
  if (!g_) throw Error("GqIntegrator: null grid");
}

void GqIntegrator::nonlinear(GqState& s, double dt) const {
  const int n = spec_.n;
  std::vector<FlatPoly> f;
  for (const auto& p : spec_.f) f.push_back(flatten(p));
  std::vector<double> rate_scale(static_cast<std::size_t>(n)), dens_w(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto J = static_cast<std::size_t>(j);
    rate_scale[J] = 1.0 / spec_.a[J];
    dens_w[J] = spec_.a[J] * spec_.s[J];
  }
  const std::size_t N = static_cast<std::size_t>(n);
  std::vector<cplx> z(N), k1(N), k2(N), k3(N), k4(N), tmp(N);
  auto rhs = [&](const std::vector<cplx>& x, std::vector<cplx>& out) {
    for (std::size_t j = 0; j < N; ++j) out[j] = cplx(0.0, rate_scale[j]) * eval_flat(f[j], x.data());
  };
  // Same substep rule as the two-component flow: relative rate from the largest field value.
  double zmax = 0.0, coef = 0.0;
  for (const auto& u : s.u)
    for (const auto& x : u) zmax = std::max(zmax, std::abs(x));
  for (std::size_t j = 0; j < N; ++j) {
    double sum = 0.0;
    for (const auto& t : f[j]) sum += std::abs(t.c);
    coef = std::max(coef, sum * rate_scale[j]);
  }
  const int nsub = std::clamp(static_cast<int>(std::ceil(dt * coef * zmax / 0.05)), 1, 4);
  const double h = dt / nsub;
  for (std::size_t i = 0; i < g_->size(); ++i) {
    double dens = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      z[j] = s.u[j][i];
      dens += dens_w[j] * std::norm(z[j]);
    }
    if (dens == 0.0) continue;
    for (int q = 0; q < nsub; ++q) {
      rhs(z, k1);
      for (std::size_t j = 0; j < N; ++j) tmp[j] = z[j] + 0.5 * h * k1[j];
      rhs(tmp, k2);
      for (std::size_t j = 0; j < N; ++j) tmp[j] = z[j] + 0.5 * h * k2[j];
      rhs(tmp, k3);
      for (std::size_t j = 0; j < N; ++j) tmp[j] = z[j] + h * k3[j];
      rhs(tmp, k4);
      for (std::size_t j = 0; j < N; ++j) z[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    // sum a_j s_j |u_j|^2 is invariant under the pointwise flow.
    double after = 0.0;
    for (std::size_t j = 0; j < N; ++j) after += dens_w[j] * std::norm(z[j]);
    const double sc = std::sqrt(dens / after);
    for (std::size_t j = 0; j < N; ++j) s.u[j][i] = z[j] * sc;
  }
}

void GqIntegrator::step(GqState& s, double dt) {
  if (!(dt > 0.0)) throw Error("GqIntegrator: dt must be positive");
  if (!s.grid || !s.grid->same_as(*g_)) throw Error("GqIntegrator: state grid differs from the integrator grid");
  s.validate(spec_);
  const double half = 0.5 * dt;
  auto linear = [&]() {
    for (int j = 0; j < spec_.n; ++j) {
      const auto J = static_cast<std::size_t>(j);
      auto& slot = cache_[J];
      if (!slot || slot->tau() != half) slot.emplace(g_, spec_.b[J] / spec_.a[J], half);
      slot->apply(s.u[J]);
      if (spec_.c[J] != 0.0) {
        const cplx ph = std::polar(1.0, -spec_.c[J] / spec_.a[J] * half);
        for (auto& x : s.u[J]) x *= ph;
      }
    }
  };
  linear();
  if (nonlinear_) nonlinear(s, dt);
  linear();
  s.t += dt;
}

GqTrajectory gq_evolve(const QuadraticSystemSpec& spec, const GqState& s0, const IntegratorConfig& cfg) {
  cfg.validate();
  spec.validate();
  s0.validate(spec);
  GqState s = s0;
  GqIntegrator integ(spec, s.grid, cfg.nonlinear);
  GqTrajectory out;
  const GeneralizedReport r0 = generalized_report(spec, s);
  auto sample = [&](const GeneralizedReport& r) {
    GqSample smp;
    smp.t = s.t;
    smp.report = r;
    smp.mass_drift = r0.g_mass > 0.0 ? std::abs(r.g_mass - r0.g_mass) / r0.g_mass : std::abs(r.g_mass);
    smp.energy_drift = std::abs(r.g_energy - r0.g_energy) / std::max(1.0, std::abs(r0.g_energy));
    out.samples.push_back(smp);
  };
  sample(r0);
  GeneralizedReport r = r0;
  const double t_stop = s.t + cfg.t_end;
  double dt = cfg.dt0;
  long n = 0;
  bool sampled_last = true;
  while (true) {
    const double remaining = t_stop - s.t;
    if (remaining <= 1e-6 * std::min(dt, cfg.dt0)) break;
    if (n >= cfg.max_steps) throw Error("gq_evolve: step budget exhausted before the horizon");
    dt = cfg.dt0;
    if (cfg.adapt && r.g_T > 0.0) {
      const double cap = cfg.c_adapt / r.g_T;
      while (dt > cap && dt >= cfg.dt_min) dt *= 0.5;
    }
    if (dt < cfg.dt_min) {
      out.termination = Termination::dt_underflow;
      break;
    }
    dt = std::min(dt, remaining);
    integ.step(s, dt);
    ++n;
    r = generalized_report(spec, s);
    sampled_last = false;
    if (r0.g_T > 0.0 && r.g_T > cfg.blowup_factor * r0.g_T) {
      out.termination = Termination::blowup_detected;
      break;
    }
    if (n % cfg.monitor_stride == 0) {
      sample(r);
      sampled_last = true;
    }
  }
  if (!sampled_last) sample(r);
  out.steps = n;
  out.final_state = std::move(s);
  return out;
}

}  // namespace qnls::gq
