#pragma once
/**
 * @file experiments.hpp
 * @brief Named experiments behind the qnls subcommands.
 *
 * Every run writes manifest.json into its output directory, also when it fails. The manifest carries
 * the config hash, versions, every derived constant, the results, and a flat `summary` of scalars
 * that sweeps aggregate into summary.csv.
 */

#include <cstdint>
#include <filesystem>

#include <json.hpp>

#include "qnls/gqnls.hpp"
#include "qnls_cli/config.hpp"

namespace qnls::cli {

struct RunContext {
  std::filesystem::path out = "out";
  std::uint64_t seed = 0;
  int threads = 1;
};

struct RunResult {
  int status = 0;  ///< 0 ok, 1 module error (sweeps: some points failed)
  nlohmann::json manifest;
};

RunResult run_experiment(Experiment e, const RunConfig& cfg, const RunContext& ctx);
/// One run per parameter value on a worker pool; point k writes into out/point_<k>.
RunResult run_sweep(const RunConfig& cfg, const RunContext& ctx);

/// Builders shared by the experiments (and usable from tests).
GridPtr build_grid(const RunConfig& cfg);
GroundStatePair solve_configured_ground_state(const RunConfig& cfg);
SystemState build_initial_state(const RunConfig& cfg, GridPtr g, const GroundStatePair* gs);
std::vector<VirialMonitor> build_monitors(const RunConfig& cfg, const SymmetryGrid& g);
gq::QuadraticSystemSpec build_gq_spec(const RunConfig& cfg);

}  // namespace qnls::cli
