#pragma once
/**
 * @file grid.hpp
 * @brief Radial and cylindrical discretizations of R^d with summation-by-parts operators.
 *
 * Each axis carries a face derivative D, face weights A and node weights W. The discrete
 * Laplacian is -W^{-1} D^T A D, so it is symmetric in the W inner product and the kinetic
 * quadratic form is exactly sum_faces A |D f|^2.
 *
 * Radial axis: cell-centred nodes r_j = (j + 1/2) h, even reflection at r = 0, odd reflection
 * (homogeneous Dirichlet) at r_max. Line axis: cell-centred nodes on [-L, L] with odd
 * reflection at both ends.
 */

#include <algorithm>
#include <complex>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

namespace qnls {

using cplx = std::complex<double>;
using RealField = std::vector<double>;
using ComplexField = std::vector<cplx>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Surface area of the unit sphere S^k in R^{k+1}.
double sphere_area(int k);
/// Volume of the unit ball in R^d.
double ball_volume(int d);

struct Tap {
  int node = 0;
  double c = 0.0;
};

class Axis {
 public:
  enum class Kind { radial, line };

  /// Radial axis with measure r^{m-1} dr on (0, extent].
  static Axis radial(int m, double extent, int n, int order = 4);
  /// Line axis on [-half_extent, half_extent].
  static Axis line(double half_extent, int n, int order = 4);

  Kind kind() const { return kind_; }
  int m() const { return m_; }
  int size() const { return n_; }
  int order() const { return order_; }
  double h() const { return h_; }
  double extent() const { return extent_; }
  int face_count() const { return static_cast<int>(xf_.size()); }
  int half_bandwidth() const { return bw_; }

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& weights() const { return w_; }
  const std::vector<double>& faces() const { return xf_; }
  const std::vector<double>& face_weights() const { return a_; }

  /// Stiffness K = D^T A D, zero outside the band.
  double stiffness(int i, int j) const;

  template <class T>
  T derivative_at(int q, const T* f, std::ptrdiff_t stride) const {
    const Tap* t = &dtaps_[static_cast<std::size_t>(q) * 4];
    return t[0].c * f[t[0].node * stride] + t[1].c * f[t[1].node * stride] +
           t[2].c * f[t[2].node * stride] + t[3].c * f[t[3].node * stride];
  }

  template <class T>
  T interpolate_at(int q, const T* f, std::ptrdiff_t stride) const {
    const Tap* t = &itaps_[static_cast<std::size_t>(q) * 4];
    return t[0].c * f[t[0].node * stride] + t[1].c * f[t[1].node * stride] +
           t[2].c * f[t[2].node * stride] + t[3].c * f[t[3].node * stride];
  }

  /// out = K f along one strided line.
  template <class T>
  void stiffness_apply(const T* f, std::ptrdiff_t s, T* out, std::ptrdiff_t so) const {
    const int width = 2 * bw_ + 1;
    for (int i = 0; i < n_; ++i) {
      T acc(0);
      const double* row = &k_[static_cast<std::size_t>(i) * static_cast<std::size_t>(width)];
      const int j0 = std::max(0, i - bw_), j1 = std::min(n_ - 1, i + bw_);
      for (int j = j0; j <= j1; ++j) acc += row[j - i + bw_] * f[j * s];
      out[i * so] = acc;
    }
  }

  /// out = K f for `lines` interleaved lines: entry i of line l at f[i * s + l] (same layout for out).
  template <class T>
  void stiffness_apply_lines(const T* f, std::ptrdiff_t s, int lines, T* out) const {
    const int width = 2 * bw_ + 1;
    for (int i = 0; i < n_; ++i) {
      T* o = out + i * s;
      for (int k = 0; k < lines; ++k) o[k] = T(0);
      const double* row = &k_[static_cast<std::size_t>(i) * static_cast<std::size_t>(width)];
      const int j0 = std::max(0, i - bw_), j1 = std::min(n_ - 1, i + bw_);
      for (int j = j0; j <= j1; ++j) {
        const double c = row[j - i + bw_];
        const T* fj = f + j * s;
        for (int k = 0; k < lines; ++k) o[k] += c * fj[k];
      }
    }
  }

 private:
  void build(int order);

  Kind kind_ = Kind::radial;
  int m_ = 1, n_ = 0, order_ = 4, bw_ = 3;
  double h_ = 0.0, extent_ = 0.0;
  std::vector<double> x_, w_, xf_, a_;
  std::vector<Tap> dtaps_, itaps_;
  std::vector<double> k_;
};

enum class Symmetry { radial, cylindrical };

class SymmetryGrid;
using GridPtr = std::shared_ptr<const SymmetryGrid>;

/// Tensor grid: radial (rho axis only) or cylindrical (rho axis x line axis). Immutable.
class SymmetryGrid {
 public:
  static GridPtr radial(int d, double r_max, int n, int order = 4);
  static GridPtr cylindrical(int d, double rho_max, int n_rho, double z_max, int n_z, int order = 4);

  Symmetry symmetry() const { return sym_; }
  bool is_radial() const { return sym_ == Symmetry::radial; }
  int dim() const { return d_; }
  /// Exponent of the rho measure: d (radial) or d - 1 (cylindrical).
  int rho_exponent() const { return rho_.m(); }
  const Axis& rho() const { return rho_; }
  const Axis& z() const;
  int n_rho() const { return rho_.size(); }
  int n_z() const { return is_radial() ? 1 : z_.size(); }
  std::size_t size() const { return static_cast<std::size_t>(n_rho()) * static_cast<std::size_t>(n_z()); }
  std::size_t index(int i, int k) const { return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_z()) + static_cast<std::size_t>(k); }
  /// Unit-sphere area multiplying the rho measure.
  double area_factor() const { return area_; }
  /// z-direction quadrature weight of column k (1 for radial grids).
  double z_weight(int k) const { return is_radial() ? 1.0 : z_.weights()[static_cast<std::size_t>(k)]; }
  double z_node(int k) const { return is_radial() ? 0.0 : z_.nodes()[static_cast<std::size_t>(k)]; }
  double rho_node(int i) const { return rho_.nodes()[static_cast<std::size_t>(i)]; }
  const RealField& weights() const { return w_; }

  /// Same spacing with `extra` additional rho cells; nodes below the old r_max are unchanged.
  GridPtr extended(int extra) const;
  bool same_as(const SymmetryGrid& o) const;

 private:
  SymmetryGrid() = default;
  void finish();

  Symmetry sym_ = Symmetry::radial;
  int d_ = 4;
  double area_ = 1.0;
  Axis rho_, z_;
  RealField w_;
};

/// Discrete Laplacian on a symmetry grid with Dirichlet outer closure.
class LaplacianOperator {
 public:
  explicit LaplacianOperator(GridPtr g) : grid_(std::move(g)) {}
  const SymmetryGrid& grid() const { return *grid_; }
  RealField apply(const RealField& f) const;
  ComplexField apply(const ComplexField& f) const;

 private:
  GridPtr grid_;
};

RealField apply_laplacian(const SymmetryGrid& g, const RealField& f);
ComplexField apply_laplacian(const SymmetryGrid& g, const ComplexField& f);
/// K f = -W Delta f (unweighted stiffness action), useful for assembling residuals.
RealField apply_stiffness(const SymmetryGrid& g, const RealField& f);

double integrate(const SymmetryGrid& g, const RealField& f);
/// Re sum w conj(f) g.
double inner(const SymmetryGrid& g, const ComplexField& f, const ComplexField& h);
double inner(const SymmetryGrid& g, const RealField& f, const RealField& h);
double norm2(const SymmetryGrid& g, const ComplexField& f);
double norm2(const SymmetryGrid& g, const RealField& f);

/// sum over rho faces of A_q wz_k g_q |D_rho f|^2; g empty means g = 1.
double gradient_rho(const SymmetryGrid& g, const ComplexField& f, const std::vector<double>& face_factor = {});
double gradient_rho(const SymmetryGrid& g, const RealField& f, const std::vector<double>& face_factor = {});
/// sum over z faces of w_rho,i A^z_q |D_z f|^2 (zero for radial grids).
double gradient_z(const SymmetryGrid& g, const ComplexField& f);
double gradient_z(const SymmetryGrid& g, const RealField& f);
/// ||grad f||^2.
template <class F>
double gradient_norm2(const SymmetryGrid& g, const F& f) {
  return gradient_rho(g, f) + gradient_z(g, f);
}

/// sum over rho faces of A_q wz_k g_q Im(D_rho f conj(I_rho f)).
double momentum_rho(const SymmetryGrid& g, const ComplexField& f, const std::vector<double>& face_factor);
/// sum over rho faces of A_q wz_k g_q Re(D_rho f conj(I_rho f)), i.e. half of int g d_rho |f|^2.
double flux_rho(const SymmetryGrid& g, const ComplexField& f, const std::vector<double>& face_factor);
/// sum over z faces of w_rho,i A^z_q g_q Im(D_z f conj(I_z f)).
double momentum_z(const SymmetryGrid& g, const ComplexField& f, const std::vector<double>& face_factor);

/// Samples a function of (rho, z) at every node.
template <class Fn>
RealField sample(const SymmetryGrid& g, Fn&& fn) {
  RealField out(g.size());
  for (int i = 0; i < g.n_rho(); ++i)
    for (int k = 0; k < g.n_z(); ++k) out[g.index(i, k)] = fn(g.rho_node(i), g.z_node(k));
  return out;
}

void require_same_grid(const SymmetryGrid& a, const SymmetryGrid& b);
void require_size(const SymmetryGrid& g, std::size_t n);

}  // namespace qnls
