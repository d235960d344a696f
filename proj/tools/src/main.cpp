#include <cstdio>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "qnls_cli/experiments.hpp"
#include "qnls_cli/output.hpp"

namespace {

constexpr int kUsageError = 2;

struct Flags {
  std::string config;
  std::string out = "out";
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

int run(qnls::cli::Experiment e, const Flags& f) {
  using namespace qnls::cli;
  RunConfig cfg;
  try {
    std::ifstream in(f.config, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + f.config + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = parse_config(ss.str());
    if (cfg.experiment && *cfg.experiment != e) {
      throw ConfigError(std::string("config is for '") + experiment_name(*cfg.experiment) + "', not '" + experiment_name(e) + "'");
    }
    check_preconditions(cfg, e);
  } catch (const ConfigError& err) {
    // what() already starts with line:col when the location is known.
    std::fprintf(stderr, err.line() > 0 ? "%s:%s\n" : "%s: %s\n", f.config.c_str(), err.what());
    return kUsageError;
  }

  RunContext ctx;
  ctx.out = f.out;
  ctx.threads = f.threads;
  ctx.seed = f.seed.value_or(cfg.seed.value_or(0));
  try {
    const RunResult r = run_experiment(e, cfg, ctx);
    if (r.status != 0) std::fprintf(stderr, "error: %s\n", r.manifest.value("error", std::string("some sweep points failed")).c_str());
    std::printf("%s\n", (ctx.out / "manifest.json").string().c_str());
    return r.status;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using qnls::cli::Experiment;
  CLI::App app{"qnls: two-component quadratic NLS experiments"};
  app.set_version_flag("--version", QNLS_VERSION_STRING);
  app.require_subcommand(1);

  Flags flags;
  std::optional<Experiment> chosen;
  for (Experiment e : {Experiment::groundstate, Experiment::evolve, Experiment::virial_check, Experiment::cutoff_check, Experiment::classify,
                       Experiment::constants, Experiment::gq_run, Experiment::sweep}) {
    CLI::App* sub = app.add_subcommand(qnls::cli::experiment_name(e));
    sub->add_option("--config", flags.config, "JSON run configuration")->required();
    sub->add_option("--out", flags.out, "output directory")->capture_default_str();
    sub->add_option("--threads", flags.threads, "sweep worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
    sub->add_option("--seed", flags.seed, "random seed (overrides the config)");
    sub->callback([&chosen, e] { chosen = e; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kUsageError;
  }
  return run(*chosen, flags);
}
