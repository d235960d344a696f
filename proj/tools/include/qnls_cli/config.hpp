#pragma once
/**
 * @file config.hpp
 * @brief Run configuration: JSON text with a schema version, strict keys, and line:column diagnostics.
 *
 * All quantities are nondimensional (the PDE is written in scaled variables); the optional
 * `units` key exists only so that a config can say so explicitly.
 */

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnls/evolution.hpp"

namespace qnls::cli {

inline constexpr int kSchemaVersion = 1;

/// Validation failure; line and column are 1-based, 0 when the location is unknown.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_ = 0, column_ = 0;
};

enum class Experiment { groundstate, evolve, virial_check, cutoff_check, classify, constants, gq_run, sweep };

const char* experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& name);

struct GridConfig {
  std::string symmetry = "radial";  ///< radial | cylindrical
  double r_max = 12.0;
  int n = 1024;
  double z_max = 8.0;
  int n_z = 256;
};

struct GroundStateConfig {
  std::string method = "petviashvili";  ///< petviashvili | shooting (d = 6 always uses the explicit pair)
  double r_max = 20.0;
  int n = 1024;
  double tol = 1e-9;
  int max_iter = 5000;
};

struct ProfileConfig {
  std::string kind = "radial";  ///< radial | cylindrical | unclipped | none
  double R = 2.0;
  std::string bound = "auto";   ///< auto | none
  double c_est = 0.0;
};

struct InitialConfig {
  std::string family = "gaussian";  ///< gaussian | shell | ground_state | standing_wave
  double A = 1.0, B = 0.5, width = 1.0, chirp = 0.0;
  double r0 = 3.0;
  double r0_over_R = 0.0;  ///< when positive, r0 = r0_over_R * profile.R
  double mass = 50.0, v_ratio = 0.5;
  double lambda = 1.0, amplitude = 1.0;
};

struct CutoffConfig {
  double C = 1.0;
  std::vector<double> R_scan;  ///< empty: a geometric default scan
  int samples_per_piece = 10000;
  double r_cap = 1e8;
};

struct ClassifyConfig {
  int samples = 200;
};

struct GqTerm {
  std::vector<int> z, zbar;
  double re = 0.0, im = 0.0;
};

struct GqConfig {
  std::string preset = "snls";  ///< snls | custom
  int n = 0;
  std::vector<double> a, b, c;
  std::vector<GqTerm> F;
  std::vector<double> gradient_weights;
  double omega = 1.0;
  int gn_samples = 0;  ///< random tuples for the vector GN check (d = 5); 0 skips it
};

struct SweepConfig {
  Experiment experiment = Experiment::evolve;
  std::string parameter;  ///< dotted path, array indices allowed: "initial.A", "gq.a.1"
  std::vector<double> values;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::optional<Experiment> experiment;
  int dimension = 4;
  double kappa = 1.0;
  GridConfig grid;
  IntegratorConfig integrator;
  bool integrator_snapshot_only = false;  ///< t_end == 0 in virial-check: evaluate at t = 0 only
  ProfileConfig profile;
  InitialConfig initial;
  GroundStateConfig groundstate;
  CutoffConfig cutoff;
  ClassifyConfig classify;
  GqConfig gq;
  std::optional<SweepConfig> sweep;
  std::optional<std::uint64_t> seed;

  nlohmann::json raw;  ///< the parsed document, used for hashing and sweep substitution
};

/// Parses and validates; every failure is a ConfigError located in `text` when possible.
RunConfig parse_config(const std::string& text);
/// Re-validates an edited document (sweep points); locations refer to `text`.
RunConfig parse_config(const nlohmann::json& doc, const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Checks the module preconditions for running `e` (dimension, symmetry, ranges).
void check_preconditions(const RunConfig& cfg, Experiment e);

/// Sets `value` at a dotted path; missing objects are created, array indices must exist.
void set_path(nlohmann::json& doc, const std::string& dotted, double value);

}  // namespace qnls::cli
