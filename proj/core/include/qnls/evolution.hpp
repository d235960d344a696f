#pragma once
/**
 * @file evolution.hpp
 * @brief Strang split-step integration of the two-component system on symmetry grids.
 *
 * Linear part: Crank-Nicolson with the SBP Laplacian, one banded solve per line; on cylindrical
 * grids the rho and x_d sweeps are applied in sequence (they commute). Nonlinear part: pointwise
 * u' = 2i v conj(u), v' = i u^2 by classical RK4 with at most four substeps; the density
 * |u|^2 + 2|v|^2 is invariant under this flow.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qnls/banded.hpp"
#include "qnls/groundstate.hpp"
#include "qnls/virial.hpp"

namespace qnls {

/// Crank-Nicolson propagator for u_t = i beta Delta u over a fixed step tau.
class LinearPropagator {
 public:
  LinearPropagator(GridPtr g, double beta, double tau);
  void apply(ComplexField& f) const;
  double tau() const { return tau_; }

 private:
  void sweep_rho(ComplexField& f) const;
  void sweep_z(ComplexField& f) const;

  GridPtr g_;
  double beta_ = 1.0, tau_ = 0.0;
  BandedLUNoPivot<cplx> rho_lu_, z_lu_;
};

struct IntegratorConfig {
  double dt0 = 1e-3;
  double dt_min = 1e-12;
  double t_end = 1.0;
  bool adapt = true;
  double c_adapt = 0.1;        ///< dt is the largest dt0 / 2^k with dt <= c_adapt / T
  int monitor_stride = 10;
  double blowup_factor = 1e4;  ///< T > blowup_factor * T(0) ends the run
  double shell_limit = 1e-6;   ///< outer 10% mass fraction that flags contamination
  long max_steps = 100000000;
  bool nonlinear = true;
  bool record_m_phi_steps = false;  ///< keep M_phi after every step for difference checks

  void validate() const;
};

enum class Termination { reached_horizon, blowup_detected, dt_underflow, boundary_contamination };
const char* termination_name(Termination t);

struct VirialMonitor {
  std::string name;
  cutoff::CutoffProfile profile = cutoff::CutoffProfile::unclipped();
  BoundKind bound = BoundKind::none;
  double c_est = 0.0;
};

struct TrajectorySample {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  FunctionalReport f;
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  double shell_fraction = 0.0;
  double dz_norm = 0.0;  ///< ||d_{x_d} u||^2 (cylindrical grids)
  std::vector<VirialReport> virial;
};

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  Termination termination = Termination::reached_horizon;
  FunctionalReport initial;
  double t_final = 0.0;
  long steps = 0;
  double max_dz_norm = 0.0;
  std::vector<std::string> monitor_names;
  /// Per step: time and one M_phi value per monitor (when recorded).
  std::vector<double> step_times;
  std::vector<std::vector<double>> step_m_phi;
  SystemState final_state;
};

/// Split-step integrator; the factorizations of the last step size are kept.
class Integrator {
 public:
  Integrator(GridPtr g, double kappa, bool nonlinear = true);
  void step(SystemState& s, double dt);

 private:
  const LinearPropagator& propagator(int comp, double tau);

  GridPtr g_;
  double kappa_;
  bool nonlinear_;
  std::optional<LinearPropagator> cache_[2];
};

/// One Strang step of size dt (fresh factorization; prefer Integrator in loops).
SystemState step(const SystemState& s, double dt);

/// Pointwise nonlinear flow over dt with the substep rule; exposed for testing.
void nonlinear_substep(SystemState& s, double dt);

/// Mass fraction in the outer 10% shell (rho > 0.9 rho_max or |x_d| > 0.9 z_max).
double outer_shell_fraction(const SystemState& s);

TrajectoryRecord evolve(const SystemState& s0, const IntegratorConfig& cfg, const std::vector<VirialMonitor>& monitors = {});

struct MonotoneCheck {
  bool applicable = false;  ///< false when E0 >= 0
  bool holds = true;
  struct Violation {
    double t, m_phi, majorant;
  };
  std::vector<Violation> violations;
  /// M_phi(t) <= 4 E0 t for t >= t0 = |M_phi(0)| / (-4 E0), checked on the same samples.
  bool late_bound_holds = true;
  double t0 = 0.0;
};

/// Checks M_phi(t) <= M_phi(0) + 8 E0 t (+ tol |E0| t) on the samples of monitor `index`.
MonotoneCheck monotone_bound_check(const TrajectoryRecord& rec, double E0, std::size_t index = 0, double tol = 1e-3);

struct VirialFdPoint {
  double t = 0.0;
  double fd = 0.0;     ///< central difference of the per-step M_phi
  double exact = 0.0;  ///< assembled ddt_exact at the sample
  double rel = 0.0;    ///< |fd - exact| / max(|exact|, scale)
};

/// Central differences at every interior sample with equal neighbouring steps (needs record_m_phi_steps).
/// scale defaults to the largest |ddt_exact| along the record, so near-zero crossings are not amplified.
std::vector<VirialFdPoint> virial_fd_check(const TrajectoryRecord& rec, std::size_t index = 0, double scale = 0.0);

struct GrowupFit {
  double c_fit = 0.0;
  double exponent_fit = 0.0;
  int samples = 0;
};

/// Least squares of log T against log t over samples with t >= t_from; needs two decades of t.
GrowupFit growup_rate_fit(const std::vector<double>& t, const std::vector<double>& T, double t_from = 0.0);
GrowupFit growup_rate_fit(const TrajectoryRecord& rec, double t_from = 0.0);

struct OdeBlowup {
  std::vector<double> t;
  std::vector<double> z_series;
  double t0 = 0.0;
  double t1 = 0.0;
  double a_const = 0.0;
  double c_phi = 0.0;  ///< measured sup |M_phi| / sqrt(T)
  double projected_t_star = 0.0;
};

/// z(t) = int_{t0}^t M^2 by trapezoids and t* = t1 + 1/(A^2 z(t1)) at the last sample t1.
OdeBlowup ode_blowup_projection(const std::vector<double>& t, const std::vector<double>& m, double a_const);
/// Record version: A = 4 epsilon / C_phi^2 with C_phi measured along the record; t0 is where M_phi turns negative for good.
OdeBlowup ode_blowup_diagnostic(const TrajectoryRecord& rec, double epsilon, double c, std::size_t index = 0);

// Initial-data library.

/// u = A exp(-|x|^2/w^2) e^{i chirp |x|^2}, v = B exp(-|x|^2/w^2) e^{i chirp |x|^2}.
SystemState gaussian_pair(GridPtr g, double kappa, double A, double B, double width = 1.0, double chirp = 0.0);
/// Rho-shell centred at r0 with width w (times exp(-x_d^2) on cylindrical grids), rescaled to the given mass.
SystemState shell_pair(GridPtr g, double kappa, double r0, double width, double mass, double v_ratio = 0.5);
/// amplitude * lambda^2 (phi, psi)(lambda |x|) sampled from a ground state on any grid of the same dimension.
SystemState scaled_ground_state(const GroundStatePair& gs, GridPtr g, double lambda, double amplitude = 1.0);
/// Multiplies both fields by a real factor so that M equals `mass`.
void normalize_mass(SystemState& s, double mass);

}  // namespace qnls
