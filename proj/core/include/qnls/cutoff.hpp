#pragma once
/**
 * @file cutoff.hpp
 * @brief Localizing weights phi_R = R^2 chi(r/R) and the weight functions of the localized virial bounds.
 *
 * zeta = chi' is 2s on [0,1], 2[s - (s-1)^3] on (1, s1] with s1 = 1 + 1/sqrt(3), a quintic Hermite
 * bridge on (s1, 2) matching value, slope and curvature at both ends, and 0 for s >= 2.
 * The bridge keeps zeta in C^2, so Delta^2 phi_R is bounded and piecewise continuous.
 */

#include <vector>

#include "qnls/grid.hpp"

namespace qnls::cutoff {

inline constexpr double kS1 = 1.5773502691896257645;  // 1 + 1/sqrt(3)

/// k-th derivative of zeta at s >= 0 (k = 0..3).
double zeta(double s, int k = 0);
/// chi(s) = int_0^s zeta, closed form on every piece.
double chi(double s);
/// chi(2): the plateau value.
double chi_plateau();

enum class ProfileKind { radial, cylindrical, unclipped };

/**
 * Weight phi on R^d. radial: R^2 chi(|x|/R). cylindrical: R^2 chi(rho/R) + x_d^2.
 * unclipped: |x|^2 on any grid. The radial part f depends on the rho (or r) variable only.
 */
class CutoffProfile {
 public:
  static CutoffProfile radial(double R);
  static CutoffProfile cylindrical(double R);
  static CutoffProfile unclipped();

  ProfileKind kind() const { return kind_; }
  double R() const { return R_; }
  bool clipped() const { return kind_ != ProfileKind::unclipped; }

  /// k-th derivative of the radial part f at rho (k = 0..4).
  double f(double rho, int k = 0) const;
  /// Laplacian of the radial part in a space with measure rho^{m-1} d rho.
  double lap_f(double rho, int m) const;
  /// d/drho of lap_f; continuous because zeta is C^2.
  double lap_f_prime(double rho, int m) const;
  /// Bi-Laplacian of the radial part, same measure.
  double bilap_f(double rho, int m) const;

  /// theta_1 = 2 - f''.
  double theta1(double rho) const { return 2.0 - f(rho, 2); }
  /// theta_2 = 2m - Lap_m f = (2 - f'') + (m-1)(2 - f'/rho).
  double theta2(double rho, int m) const;

  /// Checks that the profile fits the grid symmetry.
  void require_compatible(const SymmetryGrid& g) const;

 private:
  ProfileKind kind_ = ProfileKind::radial;
  double R_ = 1.0;
};

/// Sampled weights on grid nodes: theta1(rho), theta2(rho) with m = grid rho exponent.
struct WeightPair {
  RealField theta1, theta2;
  int m = 0;
};
WeightPair weight_pair(const CutoffProfile& p, const SymmetryGrid& g);

/// Exponent p in C R^{-p}: 3/2 for the radial d = 4 bound, 1 for the cylindrical d = 4 bound.
double bound_exponent(ProfileKind kind);
/// m - 1 multiplying (2 - f'/rho) in theta_2: 3 (radial d = 4) or 2 (cylindrical d = 4).
int theta2_factor(ProfileKind kind);

struct Certificate {
  bool holds = false;
  double margin = 0.0;         ///< min over s > 1 of theta1 - C R^{-p} theta2^2
  double r_min_margin = 0.0;   ///< radius where the minimum occurs
  double inner_margin = 0.0;   ///< max |margin| on r <= R (identically zero)
  double k_ratio = 0.0;        ///< sampled inf over s > 1 of theta1 / theta2^2
  double c_max = 0.0;          ///< largest C certified at this R: k_ratio R^p
  long samples = 0;
};

/// Dense sampling (>= samples_per_piece points on each polynomial piece) plus the knots.
Certificate certify_pointwise_inequality(ProfileKind kind, double C, double R, int samples_per_piece = 10000);

/// Smallest R (to 1% resolution) with a certificate; throws above r_cap.
double min_admissible_R(ProfileKind kind, double C, double r_cap = 1e8);

/// Certification outcome for each R in `Rs`.
std::vector<bool> admissible_scan(ProfileKind kind, double C, const std::vector<double>& Rs);

}  // namespace qnls::cutoff
