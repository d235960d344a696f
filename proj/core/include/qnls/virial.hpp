#pragma once
/**
 * @file virial.hpp
 * @brief Localized virial functional M_phi, its exact time derivative, and the one-sided localized bounds.
 *
 * Every report splits the exact derivative as
 *   ddt_exact = 8 G - hessian_defect + bilap + potential_tail,
 * which holds to round-off on the discrete level because all four pieces share the same face sums.
 * The bi-Laplacian piece is evaluated after one integration by parts, int grad(Delta phi) . grad(density),
 * since Delta^2 phi jumps at the profile knots while grad(Delta phi) is continuous.
 * Bounds are affine in the unknown constant: rhs = bound_base + c_est * bound_shape.
 */

#include <string>
#include <vector>

#include "qnls/cutoff.hpp"
#include "qnls/functionals.hpp"

namespace qnls {

enum class BoundKind {
  none,              ///< identity only
  radial_4d,         ///< localized estimate for radial data in d = 4, exponent 3/2
  cylindrical_4d,    ///< refined cylindrical estimate in d = 4, exponent 1
  cylindrical_high,  ///< cylindrical estimate in d = 5, 6, exponent (d-2)/2
};

const char* bound_name(BoundKind b);

struct VirialRemainders {
  double bilap = 0.0;           ///< -int Delta^2 phi (|u|^2 + kappa |v|^2)
  double hessian_defect = 0.0;  ///< 4 int (2 - f'') (|grad_y u|^2 + kappa |grad_y v|^2)
  double potential_tail = 0.0;  ///< 2 Re int (2m - Delta_m f) v conj(u)^2
};

struct VirialReport {
  double t = 0.0;
  double m_phi = 0.0;
  double ddt_exact = 0.0;
  double ddt_bound_rhs = 0.0;
  double bound_base = 0.0;
  double bound_shape = 0.0;
  double c_est = 0.0;
  double g_value = 0.0;          ///< 8 G
  double tail_normalizer = 0.0;  ///< the quantity the potential tail is measured against
  VirialRemainders remainders;
  BoundKind bound = BoundKind::none;

  double remainder_coefficient() const;
};

double m_phi(const SystemState& s, const cutoff::CutoffProfile& p);

/// Exact derivative and its decomposition; bound fields left empty.
VirialReport ddt_m_phi_exact(const SystemState& s, const cutoff::CutoffProfile& p);

VirialReport radial_bound_4d(const SystemState& s, const cutoff::CutoffProfile& p, double c_est);
VirialReport cylindrical_bound(const SystemState& s, const cutoff::CutoffProfile& p, int d, double c_est);
/// Dispatches on the bound kind; `none` returns the exact report.
VirialReport virial_report(const SystemState& s, const cutoff::CutoffProfile& p, BoundKind b, double c_est);
BoundKind default_bound(const SymmetryGrid& g, const cutoff::CutoffProfile& p);

/// Largest ratio (ddt_exact - bound_base) / bound_shape over the samples, floored at 0.
double calibrate_constant(const std::vector<VirialReport>& samples);

/// sup |Delta^2 phi_R| on a grid, from the closed-form profile derivatives.
double bilap_sup(const cutoff::CutoffProfile& p, const SymmetryGrid& g);

namespace detail {

/// Node and face samples of a profile on a grid; shared with the N-component module.
struct ProfileSamples {
  RealField lap;        ///< Delta phi at nodes
  RealField bilap;      ///< Delta^2 phi at nodes
  RealField tail;       ///< 2m - Delta_m f at nodes
  RealField theta1;     ///< 2 - f'' at nodes
  RealField theta2;     ///< theta_2 at nodes
  std::vector<double> rho_lap_d;   ///< d/drho Delta phi at rho faces, plus the knot quadrature correction
  std::vector<double> rho_f1;      ///< f' at rho faces
  std::vector<double> rho_f2;      ///< f'' at rho faces
  std::vector<double> rho_defect;  ///< 2 - f'' at rho faces
  std::vector<double> rho_theta1;  ///< theta_1 at rho faces
  std::vector<double> rho_theta2sq;  ///< theta_2^2 at rho faces
  std::vector<double> z_f1;        ///< 2 x_d at z faces (empty on radial grids)
  int m = 0;
};

ProfileSamples sample_profile(const cutoff::CutoffProfile& p, const SymmetryGrid& g);
/// M_phi from pre-sampled profile data (the grid must match the one used for sampling).
double m_phi_sampled(const SystemState& s, const ProfileSamples& ps);

}  // namespace detail

}  // namespace qnls
