#include "qnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qnls {

double sphere_area(int k) {
  const double s = 0.5 * static_cast<double>(k + 1);
  return 2.0 * std::pow(std::numbers::pi, s) / std::tgamma(s);
}

double ball_volume(int d) { return sphere_area(d - 1) / static_cast<double>(d); }

Axis Axis::radial(int m, double extent, int n, int order) {
  if (m < 1) throw Error("radial axis: measure exponent must be >= 1");
  if (!(extent > 0.0)) throw Error("radial axis: extent must be positive");
  if (n < 16) throw Error("radial axis: at least 16 cells required");
  Axis a;
  a.kind_ = Kind::radial;
  a.m_ = m;
  a.n_ = n;
  a.extent_ = extent;
  a.h_ = extent / n;
  a.build(order);
  return a;
}

Axis Axis::line(double half_extent, int n, int order) {
  if (!(half_extent > 0.0)) throw Error("line axis: extent must be positive");
  if (n < 16) throw Error("line axis: at least 16 cells required");
  Axis a;
  a.kind_ = Kind::line;
  a.m_ = 1;
  a.n_ = n;
  a.extent_ = half_extent;
  a.h_ = 2.0 * half_extent / n;
  a.build(order);
  return a;
}

double Axis::stiffness(int i, int j) const {
  if (std::abs(i - j) > bw_) return 0.0;
  return k_[static_cast<std::size_t>(i) * static_cast<std::size_t>(2 * bw_ + 1) + static_cast<std::size_t>(j - i + bw_)];
}

void Axis::build(int order) {
  if (order != 2 && order != 4) throw Error("axis: order must be 2 or 4");
  order_ = order;
  bw_ = order == 4 ? 3 : 1;
  const int n = n_;
  const double h = h_;
  const bool rad = kind_ == Kind::radial;
  const double x0 = rad ? 0.0 : -extent_;

  x_.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) x_[static_cast<std::size_t>(j)] = x0 + (j + 0.5) * h;

  // Face f sits between nodes f and f+1; the line axis adds the left boundary face f = -1.
  const int f_lo = rad ? 0 : -1;
  const int nf = n - f_lo;
  xf_.resize(static_cast<std::size_t>(nf));
  for (int q = 0; q < nf; ++q) xf_[static_cast<std::size_t>(q)] = x0 + (q + f_lo + 1) * h;

  auto reflect = [&](int j, double c) -> Tap {
    if (j < 0) return {-1 - j, rad ? c : -c};
    if (j >= n) return {2 * n - 1 - j, -c};
    return {j, c};
  };
  dtaps_.assign(static_cast<std::size_t>(nf) * 4, Tap{});
  itaps_.assign(static_cast<std::size_t>(nf) * 4, Tap{});
  for (int q = 0; q < nf; ++q) {
    const int f = q + f_lo;
    Tap* d = &dtaps_[static_cast<std::size_t>(q) * 4];
    Tap* s = &itaps_[static_cast<std::size_t>(q) * 4];
    if (order == 4) {
      const double c = 1.0 / (24.0 * h);
      d[0] = reflect(f - 1, c);
      d[1] = reflect(f, -27.0 * c);
      d[2] = reflect(f + 1, 27.0 * c);
      d[3] = reflect(f + 2, -c);
      s[0] = reflect(f - 1, -1.0 / 16.0);
      s[1] = reflect(f, 9.0 / 16.0);
      s[2] = reflect(f + 1, 9.0 / 16.0);
      s[3] = reflect(f + 2, -1.0 / 16.0);
    } else {
      d[0] = reflect(f, -1.0 / h);
      d[1] = reflect(f + 1, 1.0 / h);
      d[2] = {d[1].node, 0.0};
      d[3] = {d[1].node, 0.0};
      s[0] = reflect(f, 0.5);
      s[1] = reflect(f + 1, 0.5);
      s[2] = {s[1].node, 0.0};
      s[3] = {s[1].node, 0.0};
    }
  }

  a_.resize(static_cast<std::size_t>(nf));
  w_.resize(static_cast<std::size_t>(n));
  if (rad) {
    const double mm = static_cast<double>(m_);
    for (int q = 0; q < nf; ++q) a_[static_cast<std::size_t>(q)] = std::pow(xf_[static_cast<std::size_t>(q)], mm - 1.0) * h;
    if (order == 2) {
      // Cell volumes make the flux form exact on r^2 at every node.
      for (int j = 0; j < n; ++j) w_[static_cast<std::size_t>(j)] = (std::pow((j + 1) * h, mm) - std::pow(j * h, mm)) / mm;
    } else {
      for (int j = 0; j < n; ++j) w_[static_cast<std::size_t>(j)] = std::pow(x_[static_cast<std::size_t>(j)], mm - 1.0) * h;
    }
  } else {
    std::fill(a_.begin(), a_.end(), h);
    std::fill(w_.begin(), w_.end(), h);
  }

  auto assemble = [&]() {
    const int width = 2 * bw_ + 1;
    k_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(width), 0.0);
    for (int q = 0; q < nf; ++q) {
      const Tap* d = &dtaps_[static_cast<std::size_t>(q) * 4];
      const double aq = a_[static_cast<std::size_t>(q)];
      for (int p = 0; p < 4; ++p)
        for (int r = 0; r < 4; ++r) {
          if (d[p].c == 0.0 || d[r].c == 0.0) continue;
          const int i = d[p].node, j = d[r].node;
          k_[static_cast<std::size_t>(i) * static_cast<std::size_t>(width) + static_cast<std::size_t>(j - i + bw_)] += aq * d[p].c * d[r].c;
        }
    }
  };

  if (rad && order == 4) {
    // Origin closure: fix the first face weight and the weights of nodes 1, 2 so that
    // Delta r^2 = 2m holds exactly at nodes 0..2.
    std::vector<double> sq(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) sq[static_cast<std::size_t>(j)] = x_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
    auto k_sq = [&](int row) {
      double acc = 0.0;
      for (int j = std::max(0, row - bw_); j <= std::min(n - 1, row + bw_); ++j) acc += stiffness(row, j) * sq[static_cast<std::size_t>(j)];
      return acc;
    };
    const double mm = static_cast<double>(m_);
    a_[0] = 0.0;
    assemble();
    const double c0 = k_sq(0) + 2.0 * mm * w_[0];
    a_[0] = 1.0;
    assemble();
    const double c1 = k_sq(0) + 2.0 * mm * w_[0] - c0;
    a_[0] = -c0 / c1;
    assemble();
    for (int j = 1; j <= 2; ++j) w_[static_cast<std::size_t>(j)] = -k_sq(j) / (2.0 * mm);
  } else {
    assemble();
  }
  for (double v : w_)
    if (!(v > 0.0)) throw Error("axis: nonpositive quadrature weight");
  for (double v : a_)
    if (v < 0.0) throw Error("axis: negative face weight");
}

const Axis& SymmetryGrid::z() const {
  if (is_radial()) throw Error("radial grid has no z axis");
  return z_;
}

static void check_dim(int d) {
  if (d < 4 || d > 6) throw Error("dimension must be 4, 5 or 6 (got " + std::to_string(d) + ")");
}

GridPtr SymmetryGrid::radial(int d, double r_max, int n, int order) {
  check_dim(d);
  if (!(r_max > 0.0)) throw Error("r_max must be positive");
  auto g = std::shared_ptr<SymmetryGrid>(new SymmetryGrid());
  g->sym_ = Symmetry::radial;
  g->d_ = d;
  g->rho_ = Axis::radial(d, r_max, n, order);
  g->area_ = sphere_area(d - 1);
  g->finish();
  return g;
}

GridPtr SymmetryGrid::cylindrical(int d, double rho_max, int n_rho, double z_max, int n_z, int order) {
  check_dim(d);
  if (!(rho_max > 0.0) || !(z_max > 0.0)) throw Error("cylindrical extents must be positive");
  auto g = std::shared_ptr<SymmetryGrid>(new SymmetryGrid());
  g->sym_ = Symmetry::cylindrical;
  g->d_ = d;
  g->rho_ = Axis::radial(d - 1, rho_max, n_rho, order);
  g->z_ = Axis::line(z_max, n_z, order);
  g->area_ = sphere_area(d - 2);
  g->finish();
  return g;
}

void SymmetryGrid::finish() {
  w_.assign(size(), 0.0);
  for (int i = 0; i < n_rho(); ++i)
    for (int k = 0; k < n_z(); ++k) w_[index(i, k)] = area_ * rho_.weights()[static_cast<std::size_t>(i)] * z_weight(k);
}

GridPtr SymmetryGrid::extended(int extra) const {
  const double h = rho_.h();
  const int n = rho_.size() + extra;
  const double ext = h * n;
  if (is_radial()) return radial(d_, ext, n, rho_.order());
  return cylindrical(d_, ext, n, z_.extent(), z_.size(), rho_.order());
}

bool SymmetryGrid::same_as(const SymmetryGrid& o) const {
  if (this == &o) return true;
  if (sym_ != o.sym_ || d_ != o.d_ || n_rho() != o.n_rho() || rho_.extent() != o.rho_.extent() || rho_.order() != o.rho_.order())
    return false;
  if (!is_radial() && (z_.size() != o.z_.size() || z_.extent() != o.z_.extent())) return false;
  return true;
}

void require_same_grid(const SymmetryGrid& a, const SymmetryGrid& b) {
  if (!a.same_as(b)) throw Error("grid mismatch");
}

void require_size(const SymmetryGrid& g, std::size_t n) {
  if (g.size() != n) throw Error("field shape mismatch: expected " + std::to_string(g.size()) + " values, got " + std::to_string(n));
}

namespace {

template <class T>
std::vector<T> stiffness_impl(const SymmetryGrid& g, const std::vector<T>& f) {
  require_size(g, f.size());
  std::vector<T> out(f.size(), T(0));
  const int nr = g.n_rho(), nz = g.n_z();
  const auto& wr = g.rho().weights();
  std::vector<T> tmp(static_cast<std::size_t>(std::max(nr, nz)));
  for (int k = 0; k < nz; ++k) {
    g.rho().stiffness_apply(f.data() + k, nz, tmp.data(), 1);
    const double wz = g.z_weight(k);
    for (int i = 0; i < nr; ++i) out[g.index(i, k)] += tmp[static_cast<std::size_t>(i)] * wz;
  }
  if (!g.is_radial()) {
    for (int i = 0; i < nr; ++i) {
      g.z().stiffness_apply(f.data() + g.index(i, 0), 1, tmp.data(), 1);
      const double w = wr[static_cast<std::size_t>(i)];
      for (int k = 0; k < nz; ++k) out[g.index(i, k)] += tmp[static_cast<std::size_t>(k)] * w;
    }
  }
  for (auto& v : out) v *= g.area_factor();
  return out;
}

template <class T>
std::vector<T> laplacian_impl(const SymmetryGrid& g, const std::vector<T>& f) {
  auto out = stiffness_impl(g, f);
  const auto& w = g.weights();
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = -out[j] / w[j];
  return out;
}

template <class T>
double gradient_rho_impl(const SymmetryGrid& g, const std::vector<T>& f, const std::vector<double>& gf) {
  require_size(g, f.size());
  const Axis& ax = g.rho();
  const int nq = ax.face_count(), nz = g.n_z();
  const auto& a = ax.face_weights();
  double acc = 0.0;
  for (int k = 0; k < nz; ++k) {
    double col = 0.0;
    for (int q = 0; q < nq; ++q) {
      const double fac = gf.empty() ? 1.0 : gf[static_cast<std::size_t>(q)];
      if (fac == 0.0) continue;
      const T d = ax.derivative_at(q, f.data() + k, nz);
      col += a[static_cast<std::size_t>(q)] * fac * std::norm(d);
    }
    acc += col * g.z_weight(k);
  }
  return acc * g.area_factor();
}

template <class T>
double gradient_z_impl(const SymmetryGrid& g, const std::vector<T>& f) {
  require_size(g, f.size());
  if (g.is_radial()) return 0.0;
  const Axis& ax = g.z();
  const int nq = ax.face_count();
  const auto& a = ax.face_weights();
  const auto& wr = g.rho().weights();
  double acc = 0.0;
  for (int i = 0; i < g.n_rho(); ++i) {
    double row = 0.0;
    const T* base = f.data() + g.index(i, 0);
    for (int q = 0; q < nq; ++q) row += a[static_cast<std::size_t>(q)] * std::norm(ax.derivative_at(q, base, 1));
    acc += row * wr[static_cast<std::size_t>(i)];
  }
  return acc * g.area_factor();
}

}  // namespace

RealField apply_laplacian(const SymmetryGrid& g, const RealField& f) { return laplacian_impl(g, f); }
ComplexField apply_laplacian(const SymmetryGrid& g, const ComplexField& f) { return laplacian_impl(g, f); }
RealField apply_stiffness(const SymmetryGrid& g, const RealField& f) { return stiffness_impl(g, f); }
RealField LaplacianOperator::apply(const RealField& f) const { return laplacian_impl(*grid_, f); }
ComplexField LaplacianOperator::apply(const ComplexField& f) const { return laplacian_impl(*grid_, f); }

double integrate(const SymmetryGrid& g, const RealField& f) {
  require_size(g, f.size());
  double acc = 0.0;
  const auto& w = g.weights();
  for (std::size_t j = 0; j < f.size(); ++j) acc += w[j] * f[j];
  return acc;
}

double inner(const SymmetryGrid& g, const ComplexField& f, const ComplexField& h) {
  require_size(g, f.size());
  require_size(g, h.size());
  double acc = 0.0;
  const auto& w = g.weights();
  for (std::size_t j = 0; j < f.size(); ++j) acc += w[j] * (f[j].real() * h[j].real() + f[j].imag() * h[j].imag());
  return acc;
}

double inner(const SymmetryGrid& g, const RealField& f, const RealField& h) {
  require_size(g, f.size());
  require_size(g, h.size());
  double acc = 0.0;
  const auto& w = g.weights();
  for (std::size_t j = 0; j < f.size(); ++j) acc += w[j] * f[j] * h[j];
  return acc;
}

double norm2(const SymmetryGrid& g, const ComplexField& f) { return inner(g, f, f); }
double norm2(const SymmetryGrid& g, const RealField& f) { return inner(g, f, f); }

double gradient_rho(const SymmetryGrid& g, const ComplexField& f, const std::vector<double>& ff) { return gradient_rho_impl(g, f, ff); }
double gradient_rho(const SymmetryGrid& g, const RealField& f, const std::vector<double>& ff) { return gradient_rho_impl(g, f, ff); }
double gradient_z(const SymmetryGrid& g, const ComplexField& f) { return gradient_z_impl(g, f); }
double gradient_z(const SymmetryGrid& g, const RealField& f) { return gradient_z_impl(g, f); }

namespace {

template <class Part>
double rho_face_form(const SymmetryGrid& g, const ComplexField& f, const std::vector<double>& gf, Part part, const char* who) {
  require_size(g, f.size());
  const Axis& ax = g.rho();
  const int nq = ax.face_count(), nz = g.n_z();
  if (gf.size() != static_cast<std::size_t>(nq)) throw Error(std::string(who) + ": face factor size mismatch");
  const auto& a = ax.face_weights();
  double acc = 0.0;
  for (int k = 0; k < nz; ++k) {
    double col = 0.0;
    for (int q = 0; q < nq; ++q) {
      const double fac = gf[static_cast<std::size_t>(q)];
      if (fac == 0.0) continue;
      const cplx d = ax.derivative_at(q, f.data() + k, nz);
      const cplx s = ax.interpolate_at(q, f.data() + k, nz);
      col += a[static_cast<std::size_t>(q)] * fac * part(d * std::conj(s));
    }
    acc += col * g.z_weight(k);
  }
  return acc * g.area_factor();
}

}  // namespace

double momentum_rho(const SymmetryGrid& g, const ComplexField& f, const std::vector<double>& gf) {
  return rho_face_form(g, f, gf, [](cplx c) { return c.imag(); }, "momentum_rho");
}

double flux_rho(const SymmetryGrid& g, const ComplexField& f, const std::vector<double>& gf) {
  return rho_face_form(g, f, gf, [](cplx c) { return c.real(); }, "flux_rho");
}

double momentum_z(const SymmetryGrid& g, const ComplexField& f, const std::vector<double>& gf) {
  require_size(g, f.size());
  if (g.is_radial()) return 0.0;
  const Axis& ax = g.z();
  const int nq = ax.face_count();
  if (gf.size() != static_cast<std::size_t>(nq)) throw Error("momentum_z: face factor size mismatch");
  const auto& a = ax.face_weights();
  const auto& wr = g.rho().weights();
  double acc = 0.0;
  for (int i = 0; i < g.n_rho(); ++i) {
    const cplx* base = f.data() + g.index(i, 0);
    double row = 0.0;
    for (int q = 0; q < nq; ++q) {
      const cplx d = ax.derivative_at(q, base, 1);
      const cplx s = ax.interpolate_at(q, base, 1);
      row += a[static_cast<std::size_t>(q)] * gf[static_cast<std::size_t>(q)] * (d * std::conj(s)).imag();
    }
    acc += row * wr[static_cast<std::size_t>(i)];
  }
  return acc * g.area_factor();
}

}  // namespace qnls
