#pragma once
/**
 * @file gqnls.hpp
 * @brief N-component quadratic systems i a_j d_t u_j + b_j Delta u_j - c_j u_j = -f_j(u).
 *
 * The nonlinearity is a cubic polynomial F in (z, conj z); f_j = d_{conj z_j} F + conj(d_{z_j} F).
 * Polynomials are kept as exact coefficient maps so that mass weights and resonance are decided
 * by coefficient comparison, never by sampling.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qnls/evolution.hpp"

namespace qnls::gq {

/// Exponents of z (first N) and conj z (last N).
using Exponents = std::vector<int>;

/// Finite sum of monomials c z^p conj(z)^q in N complex variables, canonical (lexicographic) order.
class Polynomial {
 public:
  explicit Polynomial(int n = 0) : n_(n) {}

  int variables() const { return n_; }
  const std::map<Exponents, cplx>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Adds c z^p conj(z)^q; exact zeros are dropped.
  void add(const std::vector<int>& p, const std::vector<int>& q, cplx c);
  void add(const Exponents& pq, cplx c);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial scaled(cplx c) const;
  /// Complex conjugate as a function: swaps z and conj z exponents and conjugates coefficients.
  Polynomial conjugate() const;
  /// Wirtinger derivatives d/dz_j and d/d(conj z_j).
  Polynomial d_z(int j) const;
  Polynomial d_zbar(int j) const;
  /// Multiplication by z_j or conj z_j.
  Polynomial times_z(int j) const;
  Polynomial times_zbar(int j) const;

  /// Total degree when homogeneous, -1 otherwise (0 for the zero polynomial).
  int homogeneous_degree() const;
  double max_abs_coefficient() const;
  /// True when every coefficient is at most tol in modulus.
  bool vanishes(double tol = 0.0) const;

  cplx evaluate(const cplx* z) const;
  std::string to_string() const;

 private:
  int n_ = 0;
  std::map<Exponents, cplx> terms_;
};

/// f_j = d_{conj z_j} F + conj(d_{z_j} F); throws unless F is a homogeneous cubic.
std::vector<Polynomial> derive_fj(const Polynomial& F);

struct QuadraticSystemSpec {
  int n = 0;
  std::vector<double> a, b, c;
  Polynomial F;
  std::vector<Polynomial> f;  ///< derived
  std::vector<double> s;      ///< mass weights

  /// Checks signs and cubic homogeneity, derives f_j, and solves for s when `s` is empty.
  void finalize();
  void validate() const;

  /// The two-component system with a = (1, 1), b = (1, kappa), c = 0, F = conj(z1)^2 z2.
  static QuadraticSystemSpec snls(double kappa);
};

/// Positive s (min s_j = 1) with Im sum s_j f_j conj(z_j) == 0; throws when none exists.
std::vector<double> solve_mass_weights(const std::vector<Polynomial>& f, double tol = 1e-12);

struct Resonance {
  bool mass_resonant = false;
  Polynomial defect;  ///< Im-part polynomial of sum (a_j / 2 b_j) f_j conj(z_j), times 2i
};

/// Exact coefficient test (relative tolerance 1e-12) of Im sum (a_j / 2 b_j) f_j conj(z_j) == 0.
Resonance resonance_classify(const QuadraticSystemSpec& spec, double tol = 1e-12);

struct GqState {
  GridPtr grid;
  std::vector<ComplexField> u;
  double t = 0.0;

  void validate(const QuadraticSystemSpec& spec) const;
};

GqState from_pair(const SystemState& s);
SystemState to_pair(const GqState& s, double kappa);

struct GeneralizedReport {
  int d = 0;
  double omega = 1.0;
  double g_mass = 0.0;    ///< sum a_j s_j / 2 ||u_j||^2
  double g_energy = 0.0;  ///< T/2 + sum c_j ||u_j||^2 / 2 - P
  double g_T = 0.0;       ///< sum b_j ||grad u_j||^2
  double g_Q = 0.0;       ///< sum (a_j s_j omega / 2 + c_j) ||u_j||^2
  double g_P = 0.0;       ///< Re int F(u)
  double g_c_mass = 0.0;  ///< sum c_j ||u_j||^2
};

GeneralizedReport generalized_report(const QuadraticSystemSpec& spec, const GqState& s, double omega = 1.0);

/// sum_j w_j ||grad_y u_j||^2 restricted to rho faces with face factor; w defaults to a.
struct VirialOptions {
  std::optional<std::vector<double>> gradient_weights;  ///< gradient weights in the localized bound right-hand sides
};

double gq_m_phi(const QuadraticSystemSpec& spec, const GqState& s, const cutoff::CutoffProfile& p);
/// Exact derivative of the weighted virial functional (b_j weights) with its decomposition.
VirialReport gq_virial_exact(const QuadraticSystemSpec& spec, const GqState& s, const cutoff::CutoffProfile& p);
VirialReport gq_virial_radial_4d(const QuadraticSystemSpec& spec, const GqState& s, const cutoff::CutoffProfile& p, double c_est,
                                 const VirialOptions& opt = {});
VirialReport gq_virial_cylindrical_4d(const QuadraticSystemSpec& spec, const GqState& s, const cutoff::CutoffProfile& p,
                                      double c_est, const VirialOptions& opt = {});

/// Real radial N-tuple used as the optimizer of the vector Gagliardo-Nirenberg inequality.
struct GqGroundState {
  GridPtr grid;
  std::vector<RealField> phi;
  double omega = 1.0;
};

/// Embeds a two-component ground state (phi, psi) as the optimizer at frequency omega (rescaled by sqrt(omega/2)).
GqGroundState embed_ground_state(const GroundStatePair& gs, double omega = 1.0);

struct GnCheck {
  bool holds = true;
  double c_opt = 0.0;
  double max_ratio = 0.0;  ///< max P / (C_opt Q^{(6-d)/4} T^{d/4}) over the random tuples
  int samples = 0;
  int violations = 0;
};

/// C_opt from the optimizer, then the inequality on `samples` random Gaussian-shell tuples (d = 5).
GnCheck gq_gn_check(const GqGroundState& gs, const QuadraticSystemSpec& spec, double omega = 1.0, int samples = 100,
                    std::uint64_t seed = 1, double tol = 1e-9);

struct GqClassification {
  bool in_blowup_region = false;  ///< the primed threshold conditions
};

/// d = 5: M E < M(phi) E0(phi) and M T > M(phi) T(phi); d = 6: E < E0(phi) and T > T(phi).
GqClassification gq_classify(const GeneralizedReport& r, const GeneralizedReport& ground, int d);

/// Split-step integration of an N-component system; same step rules as the two-component integrator.
class GqIntegrator {
 public:
  GqIntegrator(const QuadraticSystemSpec& spec, GridPtr g, bool nonlinear = true);
  void step(GqState& s, double dt);

 private:
  void nonlinear(GqState& s, double dt) const;

  QuadraticSystemSpec spec_;
  GridPtr g_;
  bool nonlinear_;
  std::vector<std::optional<LinearPropagator>> cache_;
};

struct GqSample {
  double t = 0.0;
  GeneralizedReport report;
  double mass_drift = 0.0;
  double energy_drift = 0.0;
};

struct GqTrajectory {
  std::vector<GqSample> samples;
  Termination termination = Termination::reached_horizon;
  long steps = 0;
  GqState final_state;
};

GqTrajectory gq_evolve(const QuadraticSystemSpec& spec, const GqState& s0, const IntegratorConfig& cfg);

}  // namespace qnls::gq
