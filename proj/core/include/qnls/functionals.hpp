#pragma once

#include "qnls/grid.hpp"

namespace qnls {

struct GroundStatePair;

/// Pair (u, v) of complex fields on a shared grid.
struct SystemState {
  GridPtr grid;
  ComplexField u, v;
  double t = 0.0;
  double kappa = 1.0;

  static SystemState zeros(GridPtr g, double kappa);
  void validate() const;
};

struct FunctionalReport {
  int d = 0;
  double mass = 0.0;        ///< ||u||^2 + 2||v||^2
  double energy = 0.0;      ///< T/2 - P
  double kinetic = 0.0;     ///< ||grad u||^2 + kappa ||grad v||^2
  double potential = 0.0;   ///< Re int v conj(u)^2
  double pohozaev_g = 0.0;  ///< T - (d/2) P
  double kinetic_y = 0.0;   ///< rho-gradient part of T (all of T when radial)
  double kinetic_z = 0.0;   ///< x_d-gradient part of T
  double grad_u = 0.0;      ///< ||grad u||^2
};

FunctionalReport evaluate_functionals(const SystemState& s);
/// Builds a report from (M, T, P); the remaining fields follow by definition.
FunctionalReport report_from(int d, double mass, double kinetic, double potential);
/// Report of u_lambda = lambda^2 u(lambda x) (same for v) in closed form.
FunctionalReport scale_report(const FunctionalReport& r, double lambda);

double potential_energy(const SymmetryGrid& g, const ComplexField& u, const ComplexField& v);

struct ThresholdConstants {
  int d = 0;
  double kappa = 0.0;
  double m_gs = 0.0, t_gs = 0.0, p_gs = 0.0, e_gs = 0.0;
  double e_m = 0.0, t_m = 0.0, p_m = 0.0;  ///< products with the mass (d = 5)
  double c_gn = 0.0;                      ///< d = 4, 5
  double c_sob = 0.0;                     ///< d = 6
};

double gn_constant_from_groundstate(const GroundStatePair& gs, int d);
double sobolev_constant_from_groundstate(const GroundStatePair& gs);
ThresholdConstants threshold_constants(const GroundStatePair& gs);

struct Classification5d {
  bool in_A = false;
  bool in_A_tilde = false;
  bool in_SC = false;
};
struct Classification6d {
  bool in_B = false;
  bool in_B_tilde = false;
};

Classification5d classify_5d(const FunctionalReport& r, const ThresholdConstants& th);
Classification5d classify_5d(const SystemState& s, const ThresholdConstants& th);
Classification6d classify_6d(const FunctionalReport& r, const ThresholdConstants& th);
Classification6d classify_6d(const SystemState& s, const ThresholdConstants& th);

struct UniformBoundConstants {
  double rho = 0.0;
  double nu = 0.0;
  double epsilon = 0.0;
  double c = 0.0;
  bool negative_energy = false;  ///< the E < 0 shortcut was used
};

/// Root lambda > 1 of g(lambda) = 1 - rho, g = 5l - 4l^{5/4} (d=5) or 3l - 2l^{3/2} (d=6); returns lambda - 1.
double nu_from_rho(double rho, int d);
UniformBoundConstants uniform_bound_constants(const FunctionalReport& r0, const ThresholdConstants& th);
UniformBoundConstants uniform_bound_constants(const SystemState& s0, const ThresholdConstants& th);

}  // namespace qnls
