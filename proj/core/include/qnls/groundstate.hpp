#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qnls/functionals.hpp"

namespace qnls {

/// Real radial pair (phi, psi) solving the static system, with its functionals.
struct GroundStatePair {
  GridPtr grid;
  RealField phi, psi;
  double kappa = 0.0;
  int d = 0;
  double residual_norm = 0.0;  ///< max of the two equation residuals in quadrature norm
  double mass = 0.0, kinetic = 0.0, potential = 0.0, energy = 0.0;
  double action = 0.0;  ///< E + M/2; d <= 5 only
  int iterations = 0;
  std::string method;

  FunctionalReport report() const { return report_from(d, mass, kinetic, potential); }
  /// Standing wave (e^{i theta} phi, e^{2 i theta} psi) as an evolvable state.
  SystemState standing_wave(double theta = 0.0) const;
};

struct GroundStateOptions {
  double tol = 1e-9;
  int max_iter = 5000;
  int newton_steps = 3;
  double amplitude = 3.0;
  /// Random positive initial guess instead of the Gaussian pair.
  std::optional<std::uint64_t> seed;
};

/// Averaged Petviashvili iteration followed by damped Newton polish (d = 4, 5; radial grid).
GroundStatePair solve_ground_state(int d, double kappa, GridPtr grid, const GroundStateOptions& opt = {});

/// Residuals (-Delta phi + phi - 2 phi psi, -kappa Delta psi + 2 psi - phi^2) in quadrature norm.
double ground_state_residual(const SymmetryGrid& g, double kappa, const RealField& phi, const RealField& psi);

struct ShootingResult {
  int d = 0;
  double kappa = 0.0;
  double phi0 = 0.0, psi0 = 0.0;  ///< central values
  double r_end = 0.0;
  std::vector<double> r, phi, psi;
  double mass = 0.0, kinetic = 0.0, potential = 0.0;
  double ode_residual = 0.0;  ///< max plug-back residual relative to max phi
  bool monotone = false;
  int newton_iterations = 0;
};

/// Independent radial ODE shooting: scalar bisection at kappa = 2, then Newton continuation in kappa.
ShootingResult shooting_oracle(int d, double kappa, double tol = 1e-4);
/// Shooting result resampled onto a grid (linear interpolation) for comparison.
GroundStatePair shooting_pair(const ShootingResult& s, GridPtr grid);

/// phi = sqrt(kappa/2) 24/(1+r^2)^2, psi = 12/(1+r^2)^2 on a d = 6 radial grid, with tail-corrected functionals.
GroundStatePair explicit_static_6d(double kappa, GridPtr grid);

/// Residual of the d = 6 static system for the explicit pair, with analytic samples beyond r_max.
double explicit_6d_residual(double kappa, const SymmetryGrid& g);

/// Values at arbitrary radius r by 4-point Lagrange interpolation with even reflection at 0.
double interpolate_radial(const SymmetryGrid& g, const RealField& f, double r);

/// lambda^2 f(lambda r) sampled on the same grid (zero beyond the last node).
RealField rescale_radial(const SymmetryGrid& g, const RealField& f, double lambda);

bool positive_and_decreasing(const RealField& f, double floor_rel = 1e-8);

}  // namespace qnls
