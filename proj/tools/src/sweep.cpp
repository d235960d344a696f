#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <set>
#include <thread>

#include "qnls_cli/experiments.hpp"
#include "qnls_cli/output.hpp"

namespace qnls::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string point_dir(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "point_%04zu", i);
  return buf;
}

// Each point owns its slot; nothing else is shared between workers.
struct PointOutcome {
  double value = 0.0;
  bool ok = false;
  std::string error;
  json summary = json::object();
};

PointOutcome run_point(const RunConfig& cfg, const SweepConfig& sw, std::size_t i, const RunContext& ctx) {
  PointOutcome out;
  out.value = sw.values[i];
  RunContext pc = ctx;
  pc.out = ctx.out / point_dir(i);
  pc.seed = ctx.seed + i;
  pc.threads = 1;
  try {
    json doc = cfg.raw;
    doc.erase("sweep");
    doc["experiment"] = experiment_name(sw.experiment);
    set_path(doc, sw.parameter, sw.values[i]);
    const RunConfig pcfg = parse_config(doc, dump_json(doc));
    const RunResult r = run_experiment(sw.experiment, pcfg, pc);
    out.ok = r.status == 0;
    out.summary = r.manifest.value("summary", json::object());
    if (!out.ok) out.error = r.manifest.value("error", std::string("unknown error"));
  } catch (const std::exception& e) {
    out.error = e.what();
    try {
      write_atomic(pc.out / "manifest.json", dump_json({{"status", "error"}, {"error", out.error}, {"value", out.value}}));
    } catch (const std::exception&) {
    }
  }
  return out;
}

/// Least-squares slope of log|y| against log x over the points with finite, nonzero y.
std::optional<double> log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !std::isfinite(y[i]) || y[i] == 0.0) continue;
    const double a = std::log(x[i]), b = std::log(std::abs(y[i]));
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

bool ends_with(const std::string& s, const std::string& t) { return s.size() >= t.size() && s.compare(s.size() - t.size(), t.size(), t) == 0; }

}  // namespace

RunResult run_sweep(const RunConfig& cfg, const RunContext& ctx) {
  if (!cfg.sweep) throw ConfigError("sweep needs a sweep section");
  const SweepConfig& sw = *cfg.sweep;
  fs::create_directories(ctx.out);

  std::vector<PointOutcome> points(sw.values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) points[i] = run_point(cfg, sw, i, ctx);
  };
  const int n_threads = std::max(1, std::min<int>(ctx.threads, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::set<std::string> keys;
  for (const auto& p : points)
    for (const auto& item : p.summary.items()) keys.insert(item.key());
  std::vector<std::string> header = {"index", "value", "status"};
  header.insert(header.end(), keys.begin(), keys.end());
  CsvTable csv(header);
  json failed = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    std::vector<std::string> row = {std::to_string(i), fmt(p.value), p.ok ? "ok" : "error"};
    for (const auto& k : keys) {
      const auto it = p.summary.find(k);
      row.push_back(it == p.summary.end() || !it->is_number() ? "" : fmt(it->get<double>()));
    }
    csv.add_cells(row);
    if (!p.ok) failed.push_back({{"index", i}, {"value", p.value}, {"error", p.error}});
  }
  write_atomic(ctx.out / "summary.csv", csv.str());

  json results;
  results["points"] = points.size();
  results["failed_points"] = failed;
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    if (!p.ok) continue;
    xs.push_back(p.value);
    ys.push_back(p.summary.value("remainder_coefficient", std::nan("")));
  }
  if (ends_with(sw.parameter, "R") && keys.count("remainder_coefficient")) {
    if (const auto s = log_slope(xs, ys)) results["remainder_decay_exponent"] = *s;
  }
  if (keys.count("blowup_detected")) {
    std::vector<std::pair<double, int>> det;
    for (const auto& p : points)
      if (p.ok && p.summary.contains("blowup_detected")) det.emplace_back(p.value, p.summary["blowup_detected"].get<int>());
    std::sort(det.begin(), det.end());
    int flips = 0;
    for (std::size_t i = 1; i < det.size(); ++i) flips += det[i].second != det[i - 1].second;
    results["detection_flips"] = flips;
  }

  json m;
  m["schema_version"] = kSchemaVersion;
  m["experiment"] = "sweep";
  m["config_hash"] = config_hash(cfg.raw);
  m["config"] = cfg.raw;
  m["versions"] = {{"qnls", QNLS_VERSION_STRING}, {"schema", kSchemaVersion}};
  m["seed"] = ctx.seed;
  m["units"] = "nondimensional";
  m["sweep"] = {{"experiment", experiment_name(sw.experiment)}, {"parameter", sw.parameter}, {"values", sw.values}};
  m["status"] = failed.empty() ? "ok" : "partial_failure";
  m["results"] = results;
  write_atomic(ctx.out / "manifest.json", dump_json(m));
  return {failed.empty() ? 0 : 1, m};
}

}  // namespace qnls::cli
