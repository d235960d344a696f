#include "qnls_cli/experiments.hpp"

#include <cmath>
#include <random>

#include "qnls_cli/output.hpp"

#ifndef QNLS_VERSION_STRING
#define QNLS_VERSION_STRING "unknown"
#endif

namespace qnls::cli {

using nlohmann::json;
namespace fs = std::filesystem;

GridPtr build_grid(const RunConfig& cfg) {
  const GridConfig& g = cfg.grid;
  if (g.symmetry == "cylindrical") return SymmetryGrid::cylindrical(cfg.dimension, g.r_max, g.n, g.z_max, g.n_z);
  return SymmetryGrid::radial(cfg.dimension, g.r_max, g.n);
}

namespace {

GroundStatePair solve_on(const RunConfig& cfg, GridPtr grid) {
  const int d = cfg.dimension;
  if (d == 6) return explicit_static_6d(cfg.kappa, grid);
  if (cfg.groundstate.method == "shooting") return shooting_pair(shooting_oracle(d, cfg.kappa), grid);
  GroundStateOptions opt;
  opt.tol = cfg.groundstate.tol;
  opt.max_iter = cfg.groundstate.max_iter;
  return solve_ground_state(d, cfg.kappa, grid, opt);
}

bool same_radial_grid(const RunConfig& cfg) {
  return cfg.grid.symmetry == "radial" && cfg.grid.r_max == cfg.groundstate.r_max && cfg.grid.n == cfg.groundstate.n;
}

json functionals_json(const FunctionalReport& r) {
  return {{"mass", r.mass},       {"energy", r.energy},         {"kinetic", r.kinetic},     {"potential", r.potential},
          {"pohozaev_g", r.pohozaev_g}, {"kinetic_y", r.kinetic_y}, {"kinetic_z", r.kinetic_z}, {"grad_u", r.grad_u}};
}

json ground_state_json(const GroundStatePair& gs) {
  return {{"method", gs.method},     {"d", gs.d},           {"kappa", gs.kappa},         {"mass", gs.mass},
          {"kinetic", gs.kinetic},   {"potential", gs.potential}, {"energy", gs.energy}, {"action", gs.action},
          {"residual_norm", gs.residual_norm}, {"iterations", gs.iterations}};
}

json thresholds_json(const ThresholdConstants& th) {
  return {{"d", th.d},         {"kappa", th.kappa}, {"m_gs", th.m_gs}, {"t_gs", th.t_gs}, {"p_gs", th.p_gs},
          {"e_gs", th.e_gs},   {"e_m", th.e_m},     {"t_m", th.t_m},   {"p_m", th.p_m},   {"c_gn", th.c_gn},
          {"c_sob", th.c_sob}};
}

json virial_json(const VirialReport& r) {
  return {{"t", r.t},
          {"bound", bound_name(r.bound)},
          {"m_phi", r.m_phi},
          {"ddt_exact", r.ddt_exact},
          {"ddt_bound_rhs", r.ddt_bound_rhs},
          {"bound_base", r.bound_base},
          {"bound_shape", r.bound_shape},
          {"c_est", r.c_est},
          {"g_value", r.g_value},
          {"tail_normalizer", r.tail_normalizer},
          {"remainder_coefficient", r.remainder_coefficient()},
          {"remainders",
           {{"bilap", r.remainders.bilap}, {"hessian_defect", r.remainders.hessian_defect}, {"potential_tail", r.remainders.potential_tail}}}};
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

cutoff::CutoffProfile profile_of(const ProfileConfig& p) {
  if (p.kind == "radial") return cutoff::CutoffProfile::radial(p.R);
  if (p.kind == "cylindrical") return cutoff::CutoffProfile::cylindrical(p.R);
  return cutoff::CutoffProfile::unclipped();
}

struct Sections {
  json constants = json::object();
  json results = json::object();
  json summary = json::object();
};

// --- groundstate / constants ---------------------------------------------------------------

void add_ground_state(const RunConfig& cfg, const GroundStatePair& gs, Sections& s) {
  const int d = gs.d;
  s.results["ground_state"] = ground_state_json(gs);
  s.summary["mass"] = gs.mass;
  s.summary["kinetic"] = gs.kinetic;
  s.summary["potential"] = gs.potential;
  s.summary["residual_norm"] = gs.residual_norm;
  json rel;
  if (d <= 5) {
    rel["mass_vs_kinetic"] = rel_diff(gs.mass, (6.0 - d) / d * gs.kinetic);
    rel["mass_vs_potential"] = rel_diff(gs.mass, (6.0 - d) / 2.0 * gs.potential);
  } else {
    rel["energy_vs_kinetic"] = rel_diff(gs.energy, gs.kinetic / 6.0);
  }
  s.results["pohozaev_relative_error"] = rel;
  const ThresholdConstants th = threshold_constants(gs);
  s.constants["thresholds"] = thresholds_json(th);
  json sharp;
  if (d == 4) {
    sharp["c_gn"] = th.c_gn;
    sharp["closed_form"] = 0.5 / std::sqrt(gs.mass);
    sharp["relative_error"] = rel_diff(th.c_gn, 0.5 / std::sqrt(gs.mass));
  } else if (d == 5) {
    const double cf = 0.4 * std::pow(gs.mass * gs.kinetic, -0.25);
    sharp["c_gn"] = th.c_gn;
    sharp["closed_form"] = cf;
    sharp["relative_error"] = rel_diff(th.c_gn, cf);
  } else {
    sharp["c_sob"] = th.c_sob;
    sharp["c_sob_sqrt_t"] = th.c_sob * std::sqrt(gs.kinetic);
    sharp["relative_error"] = rel_diff(th.c_sob * std::sqrt(gs.kinetic), 1.0 / 3.0);
  }
  s.results["sharp_constant"] = sharp;
  s.summary["sharp_constant_relative_error"] = sharp["relative_error"];
  (void)cfg;
}

void run_groundstate(const RunConfig& cfg, const RunContext& ctx, Sections& s) {
  GridPtr grid = SymmetryGrid::radial(cfg.dimension, cfg.groundstate.r_max, cfg.groundstate.n);
  const GroundStatePair gs = solve_on(cfg, grid);
  add_ground_state(cfg, gs, s);
  std::string dat = "# r phi psi\n";
  for (int i = 0; i < grid->n_rho(); ++i) {
    const auto j = static_cast<std::size_t>(i);
    dat += fmt(grid->rho_node(i)) + " " + fmt(gs.phi[j]) + " " + fmt(gs.psi[j]) + "\n";
  }
  write_atomic(ctx.out / "profile.dat", dat);
}

void run_constants(const RunConfig& cfg, const RunContext& ctx, Sections& s) {
  GridPtr grid = SymmetryGrid::radial(cfg.dimension, cfg.groundstate.r_max, cfg.groundstate.n);
  const GroundStatePair gs = solve_on(cfg, grid);
  add_ground_state(cfg, gs, s);
  const ThresholdConstants th = threshold_constants(gs);
  json rel;
  if (cfg.dimension == 5) {
    rel["e_m_vs_t_m_over_10"] = rel_diff(th.e_m, th.t_m / 10.0);
    rel["e_m_vs_p_m_over_4"] = rel_diff(th.e_m, th.p_m / 4.0);
  } else if (cfg.dimension == 6) {
    rel["e_gs_vs_t_gs_over_6"] = rel_diff(th.e_gs, th.t_gs / 6.0);
  }
  s.results["relations_relative_error"] = rel;
  json doc = thresholds_json(th);
  doc["relations_relative_error"] = rel;
  write_atomic(ctx.out / "constants.json", dump_json(doc));
}

// --- initial data and monitors -------------------------------------------------------------

}  // namespace

GroundStatePair solve_configured_ground_state(const RunConfig& cfg) {
  return solve_on(cfg, SymmetryGrid::radial(cfg.dimension, cfg.groundstate.r_max, cfg.groundstate.n));
}

SystemState build_initial_state(const RunConfig& cfg, GridPtr g, const GroundStatePair* gs) {
  const InitialConfig& in = cfg.initial;
  if (in.family == "gaussian") return gaussian_pair(g, cfg.kappa, in.A, in.B, in.width, in.chirp);
  if (in.family == "shell") {
    const double r0 = in.r0_over_R > 0.0 ? in.r0_over_R * cfg.profile.R : in.r0;
    return shell_pair(g, cfg.kappa, r0, in.width, in.mass, in.v_ratio);
  }
  if (!gs) throw Error("ground-state data needs a ground state");
  if (in.family == "standing_wave" && gs->grid->same_as(*g)) return gs->standing_wave(0.0);
  const double lambda = in.family == "standing_wave" ? 1.0 : in.lambda;
  const double amp = in.family == "standing_wave" ? 1.0 : in.amplitude;
  return scaled_ground_state(*gs, g, lambda, amp);
}

std::vector<VirialMonitor> build_monitors(const RunConfig& cfg, const SymmetryGrid& g) {
  if (cfg.profile.kind == "none") return {};
  VirialMonitor m;
  m.name = cfg.profile.kind;
  m.profile = profile_of(cfg.profile);
  m.bound = cfg.profile.bound == "auto" ? default_bound(g, m.profile) : BoundKind::none;
  m.c_est = cfg.profile.c_est;
  return {m};
}

gq::QuadraticSystemSpec build_gq_spec(const RunConfig& cfg) {
  if (cfg.gq.preset == "snls") return gq::QuadraticSystemSpec::snls(cfg.kappa);
  gq::QuadraticSystemSpec spec;
  spec.n = cfg.gq.n;
  spec.a = cfg.gq.a;
  spec.b = cfg.gq.b;
  spec.c = cfg.gq.c.empty() ? std::vector<double>(static_cast<std::size_t>(spec.n), 0.0) : cfg.gq.c;
  spec.F = gq::Polynomial(spec.n);
  for (const auto& t : cfg.gq.F) spec.F.add(t.z, t.zbar, cplx(t.re, t.im));
  spec.finalize();
  return spec;
}

namespace {

struct PreparedRun {
  GridPtr grid;
  std::optional<GroundStatePair> gs;
  SystemState s0;
};

PreparedRun prepare(const RunConfig& cfg) {
  PreparedRun p;
  p.grid = build_grid(cfg);
  const std::string& fam = cfg.initial.family;
  if (fam == "ground_state" || fam == "standing_wave") {
    p.gs = same_radial_grid(cfg) ? solve_on(cfg, p.grid) : solve_configured_ground_state(cfg);
  }
  p.s0 = build_initial_state(cfg, p.grid, p.gs ? &*p.gs : nullptr);
  return p;
}

// --- evolve ------------------------------------------------------------------------------

std::vector<std::string> series_header(bool with_monitor) {
  std::vector<std::string> h = {"step", "t", "dt", "mass", "energy", "kinetic", "potential", "pohozaev_g", "mass_drift", "energy_drift", "shell_fraction", "dz_norm"};
  if (with_monitor) {
    for (const char* c : {"m_phi", "ddt_exact", "ddt_bound_rhs", "bound_base", "bound_shape", "bilap", "hessian_defect", "potential_tail", "g_value", "remainder_coefficient"}) {
      h.emplace_back(c);
    }
  }
  return h;
}

std::vector<double> series_row(const TrajectorySample& x) {
  std::vector<double> r = {static_cast<double>(x.step), x.t, x.dt, x.f.mass, x.f.energy, x.f.kinetic, x.f.potential, x.f.pohozaev_g, x.mass_drift,
                           x.energy_drift, x.shell_fraction, x.dz_norm};
  if (!x.virial.empty()) {
    const VirialReport& v = x.virial.front();
    for (double c : {v.m_phi, v.ddt_exact, v.ddt_bound_rhs, v.bound_base, v.bound_shape, v.remainders.bilap, v.remainders.hessian_defect,
                     v.remainders.potential_tail, v.g_value, v.remainder_coefficient()}) {
      r.push_back(c);
    }
  }
  return r;
}

void threshold_analysis(const RunConfig& cfg, const TrajectoryRecord& rec, bool have_monitor, Sections& s) {
  const int d = cfg.dimension;
  const GroundStatePair gs = solve_configured_ground_state(cfg);
  const ThresholdConstants th = threshold_constants(gs);
  s.constants["thresholds"] = thresholds_json(th);
  const FunctionalReport& r0 = rec.initial;
  json cls;
  bool in_region = false;
  if (d == 5) {
    const auto c = classify_5d(r0, th);
    cls = {{"in_A", c.in_A}, {"in_A_tilde", c.in_A_tilde}, {"in_SC", c.in_SC}};
    in_region = c.in_A;
  } else {
    const auto c = classify_6d(r0, th);
    cls = {{"in_B", c.in_B}, {"in_B_tilde", c.in_B_tilde}};
    in_region = c.in_B;
  }
  s.results["classification"] = cls;
  s.summary["in_blowup_region"] = in_region ? 1 : 0;
  if (!in_region) return;
  const UniformBoundConstants k = uniform_bound_constants(r0, th);
  s.constants["uniform_bound"] = {{"rho", k.rho}, {"nu", k.nu}, {"epsilon", k.epsilon}, {"c", k.c}, {"negative_energy", k.negative_energy}};
  double g_margin = -std::numeric_limits<double>::infinity();
  double t_ratio = std::numeric_limits<double>::infinity();
  for (const auto& x : rec.samples) {
    g_margin = std::max(g_margin, x.f.pohozaev_g + k.epsilon * x.f.kinetic + k.c);
    const double lhs = d == 5 ? x.f.kinetic * x.f.mass : x.f.kinetic;
    const double rhs = (1.0 + k.nu) * (d == 5 ? th.t_m : th.t_gs);
    t_ratio = std::min(t_ratio, lhs / rhs);
  }
  s.results["uniform_bound_persistence"] = {
      {"max_g_plus_eps_t_plus_c", g_margin}, {"min_kinetic_ratio", t_ratio}, {"holds", g_margin <= 0.0 && t_ratio >= 1.0}};
  s.summary["persistence_holds"] = (g_margin <= 0.0 && t_ratio >= 1.0) ? 1 : 0;
  if (!have_monitor) return;
  try {
    const OdeBlowup o = ode_blowup_diagnostic(rec, k.epsilon, k.c);
    s.results["ode_diagnostic"] = {{"t0", o.t0}, {"t1", o.t1}, {"a_const", o.a_const}, {"c_phi", o.c_phi}, {"projected_t_star", o.projected_t_star}};
    s.summary["projected_t_star"] = o.projected_t_star;
  } catch (const Error& e) {
    s.results["ode_diagnostic"] = {{"error", e.what()}};
  }
}

void run_evolve(const RunConfig& cfg, const RunContext& ctx, Sections& s) {
  PreparedRun p = prepare(cfg);
  const auto monitors = build_monitors(cfg, *p.grid);
  const TrajectoryRecord rec = evolve(p.s0, cfg.integrator, monitors);
  CsvTable csv(series_header(!monitors.empty()));
  for (const auto& x : rec.samples) csv.add(series_row(x));
  write_atomic(ctx.out / "series.csv", csv.str());

  double dm = 0.0, de = 0.0, shell = 0.0;
  for (const auto& x : rec.samples) {
    dm = std::max(dm, x.mass_drift);
    de = std::max(de, x.energy_drift);
    shell = std::max(shell, x.shell_fraction);
  }
  const bool detected = rec.termination == Termination::blowup_detected;
  s.results["termination"] = termination_name(rec.termination);
  s.results["steps"] = rec.steps;
  s.results["t_final"] = rec.t_final;
  s.results["initial"] = functionals_json(rec.initial);
  s.results["final"] = functionals_json(rec.samples.back().f);
  s.results["max_mass_drift"] = dm;
  s.results["max_energy_drift"] = de;
  s.results["max_shell_fraction"] = shell;
  s.results["max_dz_norm"] = rec.max_dz_norm;
  s.summary["energy0"] = rec.initial.energy;
  s.summary["mass0"] = rec.initial.mass;
  s.summary["blowup_detected"] = detected ? 1 : 0;
  s.summary["t_final"] = rec.t_final;
  s.summary["max_mass_drift"] = dm;
  s.summary["max_energy_drift"] = de;
  s.summary["kinetic_ratio"] = rec.samples.back().f.kinetic / rec.initial.kinetic;

  if (!monitors.empty()) {
    const VirialMonitor& m = monitors.front();
    s.constants["c_est"] = m.c_est;
    s.constants["profile"] = {{"kind", cfg.profile.kind}, {"R", cfg.profile.R}, {"bound", bound_name(m.bound)}};
    if (rec.initial.energy < 0.0) {
      const MonotoneCheck mc = monotone_bound_check(rec, rec.initial.energy);
      s.results["monotone_bound"] = {{"holds", mc.holds}, {"violations", mc.violations.size()}, {"late_bound_holds", mc.late_bound_holds}, {"t0", mc.t0}};
      s.summary["monotone_holds"] = mc.holds ? 1 : 0;
    }
    if (m.bound != BoundKind::none) {
      std::vector<VirialReport> reps;
      long above = 0;
      for (const auto& x : rec.samples) {
        reps.push_back(x.virial.front());
        if (x.virial.front().ddt_exact > x.virial.front().ddt_bound_rhs) ++above;
      }
      s.results["one_sided"] = {{"samples", reps.size()}, {"violations", above}, {"c_calibrated", calibrate_constant(reps)}};
      s.summary["bound_violations"] = above;
      s.summary["c_calibrated"] = s.results["one_sided"]["c_calibrated"];
    }
  }
  try {
    const GrowupFit gf = growup_rate_fit(rec);
    s.results["growup_fit"] = {{"c_fit", gf.c_fit}, {"exponent_fit", gf.exponent_fit}, {"samples", gf.samples}};
  } catch (const Error& e) {
    s.results["growup_fit"] = {{"error", e.what()}};
  }
  if (cfg.dimension >= 5) threshold_analysis(cfg, rec, !monitors.empty(), s);
}

// --- virial-check -------------------------------------------------------------------------

void run_virial_check(const RunConfig& cfg, const RunContext& ctx, Sections& s) {
  PreparedRun p = prepare(cfg);
  auto monitors = build_monitors(cfg, *p.grid);
  if (cfg.profile.kind != "unclipped") monitors.push_back({"unclipped", cutoff::CutoffProfile::unclipped(), BoundKind::none, 0.0});
  const VirialReport snap = virial_report(p.s0, monitors.front().profile, monitors.front().bound, monitors.front().c_est);
  s.results["initial_report"] = virial_json(snap);
  s.constants["c_est"] = cfg.profile.c_est;
  s.constants["profile"] = {{"kind", cfg.profile.kind}, {"R", cfg.profile.R}, {"bound", bound_name(monitors.front().bound)}};
  s.summary["remainder_coefficient"] = snap.remainder_coefficient();
  s.summary["potential_tail"] = snap.remainders.potential_tail;
  s.summary["tail_normalizer"] = snap.tail_normalizer;
  s.summary["ddt_exact"] = snap.ddt_exact;
  if (cfg.integrator_snapshot_only) return;

  IntegratorConfig ic = cfg.integrator;
  ic.record_m_phi_steps = true;
  const TrajectoryRecord rec = evolve(p.s0, ic, monitors);
  s.results["termination"] = termination_name(rec.termination);
  s.results["steps"] = rec.steps;
  s.results["t_final"] = rec.t_final;

  std::vector<std::string> header = {"t"};
  std::vector<std::vector<VirialFdPoint>> pts;
  json per = json::object();
  for (std::size_t m = 0; m < monitors.size(); ++m) {
    pts.push_back(virial_fd_check(rec, m));
    double worst = 0.0, worst_point = 0.0, identity = 0.0;
    for (const auto& q : pts.back()) {
      worst = std::max(worst, q.rel);
      worst_point = std::max(worst_point, std::abs(q.fd - q.exact) / std::max(std::abs(q.exact), 1e-300));
    }
    for (const auto& x : rec.samples) {
      const VirialReport& v = x.virial[m];
      if (!monitors[m].profile.clipped()) identity = std::max(identity, rel_diff(v.ddt_exact, v.g_value));
    }
    json j = {{"points", pts.back().size()}, {"max_rel_error", worst}, {"max_pointwise_rel_error", worst_point}};
    if (!monitors[m].profile.clipped()) j["max_rel_exact_vs_8g"] = identity;
    per[monitors[m].name] = j;
    s.summary["max_rel_error_" + monitors[m].name] = worst;
    for (const char* c : {"_fd", "_exact", "_rel"}) header.push_back(monitors[m].name + c);
  }
  s.results["monitors"] = per;
  CsvTable csv(header);
  const std::size_t rows = pts.empty() ? 0 : pts.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> row = {pts.front()[i].t};
    for (const auto& col : pts) {
      // Every monitor sees the same samples, so the point lists align.
      row.push_back(col[i].fd);
      row.push_back(col[i].exact);
      row.push_back(col[i].rel);
    }
    csv.add(row);
  }
  write_atomic(ctx.out / "series.csv", csv.str());
}

// --- cutoff-check -------------------------------------------------------------------------

void run_cutoff_check(const RunConfig& cfg, const RunContext& ctx, Sections& s) {
  const auto kind = cfg.profile.kind == "radial" ? cutoff::ProfileKind::radial : cutoff::ProfileKind::cylindrical;
  const double C = cfg.cutoff.C;
  const int spp = cfg.cutoff.samples_per_piece;
  const cutoff::Certificate c = cutoff::certify_pointwise_inequality(kind, C, cfg.profile.R, spp);
  s.results["certificate"] = {{"R", cfg.profile.R}, {"holds", c.holds}, {"margin", c.margin}, {"r_min_margin", c.r_min_margin},
                              {"inner_margin", c.inner_margin}, {"k_ratio", c.k_ratio}, {"c_max", c.c_max}, {"samples", c.samples}};
  const double r_min = cutoff::min_admissible_R(kind, C, cfg.cutoff.r_cap);
  s.constants["C"] = C;
  s.constants["certified_R_min"] = r_min;
  s.constants["bound_exponent"] = cutoff::bound_exponent(kind);
  std::vector<double> Rs = cfg.cutoff.R_scan;
  if (Rs.empty()) {
    for (int k = 0; k < 40; ++k) Rs.push_back(1.05 * std::pow(1e4 / 1.05, k / 39.0));
  }
  CsvTable csv({"R", "holds", "margin", "k_ratio"});
  bool monotone = true, seen = false;
  for (double R : Rs) {
    const cutoff::Certificate ck = cutoff::certify_pointwise_inequality(kind, C, R, spp);
    csv.add({R, ck.holds ? 1.0 : 0.0, ck.margin, ck.k_ratio});
    if (seen && !ck.holds && R >= r_min) monotone = false;
    seen = seen || ck.holds;
  }
  write_atomic(ctx.out / "scan.csv", csv.str());
  s.results["scan_monotone"] = monotone;
  s.summary["certified_R_min"] = r_min;
  s.summary["holds"] = c.holds ? 1 : 0;
  s.summary["scan_monotone"] = monotone ? 1 : 0;
}

// --- classify -----------------------------------------------------------------------------

void run_classify(const RunConfig& cfg, const RunContext& ctx, Sections& s) {
  const int d = cfg.dimension;
  const GroundStatePair gs = solve_configured_ground_state(cfg);
  const ThresholdConstants th = threshold_constants(gs);
  s.constants["thresholds"] = thresholds_json(th);
  auto energy_ok = [&](const FunctionalReport& r) { return d == 5 ? r.energy * r.mass < th.e_m : r.energy < th.e_gs; };
  auto by_T = [&](const FunctionalReport& r) { return d == 5 ? classify_5d(r, th).in_A : classify_6d(r, th).in_B; };
  auto by_G = [&](const FunctionalReport& r) { return d == 5 ? classify_5d(r, th).in_A_tilde : classify_6d(r, th).in_B_tilde; };

  // The configured state itself.
  const PreparedRun p = prepare(cfg);
  const FunctionalReport r0 = evaluate_functionals(p.s0);
  s.results["state"] = functionals_json(r0);
  s.results["state_classification"] = {{"energy_condition", energy_ok(r0)}, {"kinetic_threshold", by_T(r0)}, {"pohozaev_sign", by_G(r0)}};

  // Sampled equivalence: random Gaussian pairs with a random phase on v and a random dilation.
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> uA(0.05, 6.0), uw(0.5, 2.5), uph(0.0, 2.0 * M_PI), ul(-1.5, 1.5);
  GridPtr g = SymmetryGrid::radial(d, 16.0, 512);
  CsvTable csv({"mass", "energy", "kinetic", "potential", "pohozaev_g", "kinetic_threshold", "pohozaev_sign"});
  int accepted = 0, disagreements = 0, in_set = 0;
  long attempts = 0;
  const long max_attempts = 200L * cfg.classify.samples;
  while (accepted < cfg.classify.samples && attempts < max_attempts) {
    ++attempts;
    SystemState st = gaussian_pair(g, cfg.kappa, uA(rng), uA(rng), uw(rng));
    const cplx ph = std::polar(1.0, uph(rng));
    for (auto& v : st.v) v *= ph;
    const FunctionalReport r = scale_report(evaluate_functionals(st), std::exp(ul(rng)));
    if (!energy_ok(r)) continue;
    ++accepted;
    const bool a = by_T(r), b = by_G(r);
    if (a != b) ++disagreements;
    if (a) ++in_set;
    csv.add({r.mass, r.energy, r.kinetic, r.potential, r.pohozaev_g, a ? 1.0 : 0.0, b ? 1.0 : 0.0});
  }
  write_atomic(ctx.out / "samples.csv", csv.str());
  if (accepted < cfg.classify.samples) throw Error("classify: could not draw enough states satisfying the energy condition");
  s.results["sampled_equivalence"] = {{"samples", accepted}, {"attempts", attempts}, {"disagreements", disagreements}, {"in_blowup_set", in_set}};
  s.summary["disagreements"] = disagreements;
  s.summary["in_blowup_set"] = in_set;
}

// --- gq-run -------------------------------------------------------------------------------

json polynomial_list(const std::vector<gq::Polynomial>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(p.to_string());
  return a;
}

void run_gq(const RunConfig& cfg, const RunContext& ctx, Sections& s) {
  const gq::QuadraticSystemSpec spec = build_gq_spec(cfg);
  const gq::Resonance res = gq::resonance_classify(spec);
  s.constants["mass_weights"] = spec.s;
  s.results["system"] = {{"n", spec.n}, {"a", spec.a}, {"b", spec.b}, {"c", spec.c}, {"F", spec.F.to_string()}, {"f", polynomial_list(spec.f)}};
  s.results["resonance"] = {{"mass_resonant", res.mass_resonant}, {"defect", res.defect.to_string()}};
  s.summary["mass_resonant"] = res.mass_resonant ? 1 : 0;

  GridPtr grid = build_grid(cfg);
  gq::GqState st;
  std::optional<SystemState> pair;
  if (spec.n == 2) {
    PreparedRun p = prepare(cfg);
    grid = p.grid;
    pair = p.s0;
    st = gq::from_pair(p.s0);
  } else {
    st.grid = grid;
    for (int j = 0; j < spec.n; ++j) {
      const SystemState g = gaussian_pair(grid, 1.0, j == 0 ? cfg.initial.A : cfg.initial.B, 0.0, cfg.initial.width, cfg.initial.chirp);
      st.u.push_back(g.u);
    }
  }
  const gq::GeneralizedReport g0 = gq::generalized_report(spec, st, cfg.gq.omega);
  s.results["initial"] = {{"g_mass", g0.g_mass}, {"g_energy", g0.g_energy}, {"g_T", g0.g_T}, {"g_Q", g0.g_Q}, {"g_P", g0.g_P}};

  // The two-component preset must reproduce the pair functionals and virial outputs.
  if (cfg.gq.preset == "snls" && pair) {
    const FunctionalReport f = evaluate_functionals(*pair);
    double emb = std::max({rel_diff(g0.g_mass, 0.5 * f.mass), rel_diff(g0.g_T, f.kinetic), rel_diff(g0.g_P, f.potential), rel_diff(g0.g_energy, f.energy)});
    if (cfg.profile.kind != "none") {
      const auto prof = profile_of(cfg.profile);
      emb = std::max(emb, rel_diff(gq::gq_virial_exact(spec, st, prof).ddt_exact, ddt_m_phi_exact(*pair, prof).ddt_exact));
      emb = std::max(emb, rel_diff(gq::gq_m_phi(spec, st, prof), m_phi(*pair, prof)));
    }
    s.results["embedding_max_rel_error"] = emb;
    s.summary["embedding_max_rel_error"] = emb;
  }
  if (cfg.gq.gn_samples > 0) {
    if (cfg.dimension != 5) throw Error("gq-run: the vector GN check needs dimension 5");
    RunConfig gcfg = cfg;
    gcfg.kappa = spec.b.size() == 2 ? spec.b[1] / spec.b[0] : cfg.kappa;
    const gq::GqGroundState ggs = gq::embed_ground_state(solve_configured_ground_state(gcfg), cfg.gq.omega);
    const gq::GnCheck gn = gq::gq_gn_check(ggs, spec, cfg.gq.omega, cfg.gq.gn_samples, ctx.seed);
    s.constants["c_opt"] = gn.c_opt;
    s.results["gn_check"] = {{"holds", gn.holds}, {"max_ratio", gn.max_ratio}, {"samples", gn.samples}, {"violations", gn.violations}};
  }

  const gq::GqTrajectory tr = gq::gq_evolve(spec, st, cfg.integrator);
  CsvTable csv({"t", "g_mass", "g_energy", "g_T", "g_P", "mass_drift", "energy_drift"});
  double dm = 0.0, de = 0.0;
  for (const auto& x : tr.samples) {
    csv.add({x.t, x.report.g_mass, x.report.g_energy, x.report.g_T, x.report.g_P, x.mass_drift, x.energy_drift});
    dm = std::max(dm, x.mass_drift);
    de = std::max(de, x.energy_drift);
  }
  write_atomic(ctx.out / "series.csv", csv.str());
  s.results["termination"] = termination_name(tr.termination);
  s.results["steps"] = tr.steps;
  s.results["max_mass_drift"] = dm;
  s.results["max_energy_drift"] = de;
  s.summary["max_mass_drift"] = dm;
  s.summary["blowup_detected"] = tr.termination == Termination::blowup_detected ? 1 : 0;
}

}  // namespace

RunResult run_experiment(Experiment e, const RunConfig& cfg, const RunContext& ctx) {
  if (e == Experiment::sweep) return run_sweep(cfg, ctx);
  RunResult out;
  Sections s;
  json m;
  m["schema_version"] = kSchemaVersion;
  m["experiment"] = experiment_name(e);
  m["config_hash"] = config_hash(cfg.raw);
  m["config"] = cfg.raw;
  m["versions"] = {{"qnls", QNLS_VERSION_STRING}, {"schema", kSchemaVersion}};
  m["seed"] = ctx.seed;
  m["units"] = "nondimensional";
  try {
    fs::create_directories(ctx.out);
    check_preconditions(cfg, e);
    switch (e) {
      case Experiment::groundstate: run_groundstate(cfg, ctx, s); break;
      case Experiment::constants: run_constants(cfg, ctx, s); break;
      case Experiment::evolve: run_evolve(cfg, ctx, s); break;
      case Experiment::virial_check: run_virial_check(cfg, ctx, s); break;
      case Experiment::cutoff_check: run_cutoff_check(cfg, ctx, s); break;
      case Experiment::classify: run_classify(cfg, ctx, s); break;
      case Experiment::gq_run: run_gq(cfg, ctx, s); break;
      default: break;
    }
    m["status"] = "ok";
  } catch (const std::exception& ex) {
    m["status"] = "error";
    m["error"] = ex.what();
    out.status = 1;
  }
  m["constants"] = s.constants;
  m["results"] = s.results;
  m["summary"] = s.summary;
  write_atomic(ctx.out / "manifest.json", dump_json(m));
  out.manifest = std::move(m);
  return out;
}

}  // namespace qnls::cli
