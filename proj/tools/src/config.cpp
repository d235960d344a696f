#include "qnls_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qnls::cli {

using nlohmann::json;

ConfigError::ConfigError(const std::string& msg, int line, int column)
    : std::runtime_error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) + ": " + msg : msg), line_(line), column_(column) {}

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::groundstate: return "groundstate";
    case Experiment::evolve: return "evolve";
    case Experiment::virial_check: return "virial-check";
    case Experiment::cutoff_check: return "cutoff-check";
    case Experiment::classify: return "classify";
    case Experiment::constants: return "constants";
    case Experiment::gq_run: return "gq-run";
    default: return "sweep";
  }
}

std::optional<Experiment> parse_experiment(const std::string& name) {
  for (Experiment e : {Experiment::groundstate, Experiment::evolve, Experiment::virial_check, Experiment::cutoff_check,
                       Experiment::classify, Experiment::constants, Experiment::gq_run, Experiment::sweep}) {
    if (name == experiment_name(e)) return e;
  }
  return std::nullopt;
}

namespace {

struct Location {
  int line = 0, column = 0;
};

Location location_of_offset(const std::string& text, std::size_t offset) {
  Location loc{1, 1};
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.column = 1;
    } else {
      ++loc.column;
    }
  }
  return loc;
}

// First `"key"` followed by a colon, searched after the section's own key when there is one.
Location locate_key(const std::string& text, const std::string& section, const std::string& key) {
  auto find_key = [&](const std::string& k, std::size_t from) -> std::size_t {
    const std::string quoted = "\"" + k + "\"";
    for (std::size_t p = text.find(quoted, from); p != std::string::npos; p = text.find(quoted, p + 1)) {
      std::size_t q = p + quoted.size();
      while (q < text.size() && std::isspace(static_cast<unsigned char>(text[q]))) ++q;
      if (q < text.size() && text[q] == ':') return p;
    }
    return std::string::npos;
  };
  std::size_t from = 0;
  if (!section.empty()) {
    const std::size_t s = find_key(section, 0);
    if (s != std::string::npos) from = s;
  }
  const std::size_t p = find_key(key, from);
  if (p == std::string::npos) return {};
  return location_of_offset(text, p);
}

class Reader {
 public:
  Reader(const json& obj, std::string section, const std::string& text) : obj_(obj), section_(std::move(section)), text_(text) {
    if (!obj_.is_object()) fail(section_.empty() ? "configuration must be a JSON object" : "section '" + section_ + "' must be an object", "");
  }

  bool has(const char* key) {
    known_.insert(key);
    return obj_.contains(key);
  }

  void get(const char* key, double& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number()) fail("expected a number", key);
    out = v.get<double>();
    if (!std::isfinite(out)) fail("value must be finite", key);
  }

  void get(const char* key, int& out) {
    if (!has(key)) return;
    out = to_int(obj_.at(key), key);
  }

  void get(const char* key, long& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (v.is_number_integer()) {
      out = v.get<long>();
    } else {
      const double x = v.is_number() ? v.get<double>() : NAN;
      if (!(std::floor(x) == x) || std::abs(x) > 9e15) fail("expected an integer", key);
      out = static_cast<long>(x);
    }
  }

  void get(const char* key, bool& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) fail("expected true or false", key);
    out = v.get<bool>();
  }

  void get(const char* key, std::string& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_string()) fail("expected a string", key);
    out = v.get<std::string>();
  }

  void get(const char* key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_array()) fail("expected an array of numbers", key);
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number()) fail("expected an array of numbers", key);
      out.push_back(x.get<double>());
      if (!std::isfinite(out.back())) fail("values must be finite", key);
    }
  }

  void get(const char* key, std::vector<int>& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_array()) fail("expected an array of integers", key);
    out.clear();
    for (const auto& x : v) out.push_back(to_int(x, key));
  }

  void get(const char* key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) fail("expected a non-negative integer", key);
    out = v.get<std::uint64_t>();
  }

  const json& at(const char* key) { return obj_.at(key); }

  void one_of(const char* key, const std::string& value, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
      if (value == a) return;
    }
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    fail("'" + value + "' is not one of {" + list + "}", key);
  }

  void require(bool ok, const char* key, const std::string& what) {
    if (!ok) fail(what, key);
  }

  /// Unknown keys are hard errors; the one earliest in the text is reported.
  void finish() {
    Location best;
    std::string bad;
    for (const auto& item : obj_.items()) {
      if (known_.count(item.key())) continue;
      const Location loc = locate_key(text_, section_, item.key());
      if (bad.empty() || (loc.line > 0 && (best.line == 0 || loc.line < best.line || (loc.line == best.line && loc.column < best.column)))) {
        bad = item.key();
        best = loc;
      }
    }
    if (!bad.empty()) {
      throw ConfigError("unknown key '" + bad + "'" + (section_.empty() ? "" : " in section '" + section_ + "'"), best.line, best.column);
    }
  }

  [[noreturn]] void fail(const std::string& what, const std::string& key) const {
    const Location loc = key.empty() ? locate_key(text_, "", section_) : locate_key(text_, section_, key);
    std::string where = section_.empty() ? key : (key.empty() ? section_ : section_ + "." + key);
    throw ConfigError((where.empty() ? "" : where + ": ") + what, loc.line, loc.column);
  }

 private:
  int to_int(const json& v, const char* key) const {
    if (v.is_number_integer()) {
      const long long x = v.get<long long>();
      if (x < INT32_MIN || x > INT32_MAX) fail("integer out of range", key);
      return static_cast<int>(x);
    }
    const double x = v.is_number() ? v.get<double>() : NAN;
    if (!(std::floor(x) == x) || std::abs(x) > 2e9) fail("expected an integer", key);
    return static_cast<int>(x);
  }

  const json& obj_;
  std::string section_;
  const std::string& text_;
  std::set<std::string> known_;
};

void read_grid(Reader& r, GridConfig& g) {
  r.get("symmetry", g.symmetry);
  r.one_of("symmetry", g.symmetry, {"radial", "cylindrical"});
  r.get("r_max", g.r_max);
  r.get("n", g.n);
  r.get("z_max", g.z_max);
  r.get("n_z", g.n_z);
  r.require(g.r_max > 0.0, "r_max", "must be positive");
  r.require(g.n >= 16, "n", "needs at least 16 cells");
  r.require(g.z_max > 0.0, "z_max", "must be positive");
  r.require(g.n_z >= 16, "n_z", "needs at least 16 cells");
  r.finish();
}

void read_integrator(Reader& r, IntegratorConfig& c, bool& snapshot) {
  r.get("dt0", c.dt0);
  r.get("dt_min", c.dt_min);
  r.get("t_end", c.t_end);
  r.get("adapt", c.adapt);
  r.get("c_adapt", c.c_adapt);
  r.get("monitor_stride", c.monitor_stride);
  r.get("blowup_factor", c.blowup_factor);
  r.get("shell_limit", c.shell_limit);
  r.get("max_steps", c.max_steps);
  r.get("nonlinear", c.nonlinear);
  r.require(c.t_end >= 0.0, "t_end", "must not be negative");
  snapshot = c.t_end == 0.0;
  if (!snapshot) {
    try {
      c.validate();
    } catch (const Error& e) {
      r.fail(e.what(), "");
    }
  }
  r.finish();
}

void read_profile(Reader& r, ProfileConfig& p) {
  r.get("kind", p.kind);
  r.one_of("kind", p.kind, {"radial", "cylindrical", "unclipped", "none"});
  r.get("R", p.R);
  r.get("bound", p.bound);
  r.one_of("bound", p.bound, {"auto", "none"});
  r.get("c_est", p.c_est);
  r.require(p.R > 0.0, "R", "must be positive");
  r.require(p.c_est >= 0.0, "c_est", "must not be negative");
  r.finish();
}

void read_initial(Reader& r, InitialConfig& i) {
  r.get("family", i.family);
  r.one_of("family", i.family, {"gaussian", "shell", "ground_state", "standing_wave"});
  r.get("A", i.A);
  r.get("B", i.B);
  r.get("width", i.width);
  r.get("chirp", i.chirp);
  r.get("r0", i.r0);
  r.get("r0_over_R", i.r0_over_R);
  r.get("mass", i.mass);
  r.get("v_ratio", i.v_ratio);
  r.get("lambda", i.lambda);
  r.get("amplitude", i.amplitude);
  r.require(i.width > 0.0, "width", "must be positive");
  r.require(i.r0 > 0.0, "r0", "must be positive");
  r.require(i.r0_over_R >= 0.0, "r0_over_R", "must not be negative");
  r.require(i.mass > 0.0, "mass", "must be positive");
  r.require(i.lambda > 0.0, "lambda", "must be positive");
  r.finish();
}

void read_groundstate(Reader& r, GroundStateConfig& g) {
  r.get("method", g.method);
  r.one_of("method", g.method, {"petviashvili", "shooting"});
  r.get("r_max", g.r_max);
  r.get("n", g.n);
  r.get("tol", g.tol);
  r.get("max_iter", g.max_iter);
  r.require(g.r_max > 0.0, "r_max", "must be positive");
  r.require(g.n >= 64, "n", "needs at least 64 cells");
  r.require(g.tol > 0.0, "tol", "must be positive");
  r.require(g.max_iter > 0, "max_iter", "must be positive");
  r.finish();
}

void read_cutoff(Reader& r, CutoffConfig& c) {
  r.get("C", c.C);
  r.get("R_scan", c.R_scan);
  r.get("samples_per_piece", c.samples_per_piece);
  r.get("r_cap", c.r_cap);
  r.require(c.C > 0.0, "C", "must be positive");
  for (double R : c.R_scan) r.require(R > 1.0, "R_scan", "every R must exceed 1");
  r.require(c.samples_per_piece >= 10000, "samples_per_piece", "must be at least 10000");
  r.require(c.r_cap > 1.0, "r_cap", "must exceed 1");
  r.finish();
}

void read_gq(Reader& r, GqConfig& g, const std::string& text) {
  r.get("preset", g.preset);
  r.one_of("preset", g.preset, {"snls", "custom"});
  r.get("n", g.n);
  r.get("a", g.a);
  r.get("b", g.b);
  r.get("c", g.c);
  r.get("gradient_weights", g.gradient_weights);
  r.get("omega", g.omega);
  r.get("gn_samples", g.gn_samples);
  if (r.has("F")) {
    const json& arr = r.at("F");
    if (!arr.is_array()) r.fail("expected an array of monomials", "F");
    for (const auto& m : arr) {
      Reader t(m, "F", text);
      GqTerm term;
      t.get("z", term.z);
      t.get("zbar", term.zbar);
      t.get("re", term.re);
      t.get("im", term.im);
      t.finish();
      g.F.push_back(term);
    }
  }
  r.require(g.omega > 0.0, "omega", "must be positive");
  r.require(g.gn_samples >= 0, "gn_samples", "must not be negative");
  if (g.preset == "custom") {
    r.require(g.n >= 1, "n", "custom systems need n >= 1");
    r.require(static_cast<int>(g.a.size()) == g.n && static_cast<int>(g.b.size()) == g.n, "a", "a and b need n entries");
    r.require(g.c.empty() || static_cast<int>(g.c.size()) == g.n, "c", "c needs n entries");
    r.require(!g.F.empty(), "F", "custom systems need monomials");
    for (const auto& t : g.F) {
      r.require(static_cast<int>(t.z.size()) == g.n && static_cast<int>(t.zbar.size()) == g.n, "F", "each monomial needs n z and n zbar exponents");
    }
  }
  r.finish();
}

void read_sweep(Reader& r, SweepConfig& s) {
  std::string name = "evolve";
  r.get("experiment", name);
  const auto e = parse_experiment(name);
  if (!e || *e == Experiment::sweep) r.fail("'" + name + "' is not a sweepable experiment", "experiment");
  s.experiment = *e;
  r.get("parameter", s.parameter);
  r.require(!s.parameter.empty(), "parameter", "a parameter path is required");
  r.get("values", s.values);
  r.require(!s.values.empty(), "values", "the parameter grid is empty");
  r.finish();
}

}  // namespace

RunConfig parse_config(const json& doc, const std::string& text) {
  RunConfig cfg;
  Reader top(doc, "", text);
  if (!top.has("schema_version")) throw ConfigError("missing schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  top.get("schema_version", cfg.schema_version);
  top.require(cfg.schema_version == kSchemaVersion, "schema_version", "unsupported schema version");
  std::string units = "nondimensional";
  top.get("units", units);
  top.one_of("units", units, {"nondimensional"});
  if (top.has("experiment")) {
    std::string name;
    top.get("experiment", name);
    cfg.experiment = parse_experiment(name);
    if (!cfg.experiment) top.fail("unknown experiment '" + name + "'", "experiment");
  }
  top.get("dimension", cfg.dimension);
  top.require(cfg.dimension >= 4 && cfg.dimension <= 6, "dimension", "must be 4, 5 or 6");
  top.get("kappa", cfg.kappa);
  top.require(cfg.kappa > 0.0, "kappa", "must be positive");
  if (top.has("seed")) {
    std::uint64_t s = 0;
    top.get("seed", s);
    cfg.seed = s;
  }
  auto section = [&](const char* name, auto&& fn) {
    if (!top.has(name)) return;
    Reader r(top.at(name), name, text);
    fn(r);
  };
  section("grid", [&](Reader& r) { read_grid(r, cfg.grid); });
  section("integrator", [&](Reader& r) { read_integrator(r, cfg.integrator, cfg.integrator_snapshot_only); });
  section("profile", [&](Reader& r) { read_profile(r, cfg.profile); });
  section("initial", [&](Reader& r) { read_initial(r, cfg.initial); });
  section("groundstate", [&](Reader& r) { read_groundstate(r, cfg.groundstate); });
  section("cutoff", [&](Reader& r) { read_cutoff(r, cfg.cutoff); });
  section("classify", [&](Reader& r) {
    r.get("samples", cfg.classify.samples);
    r.require(cfg.classify.samples >= 1, "samples", "must be positive");
    r.finish();
  });
  section("gq", [&](Reader& r) { read_gq(r, cfg.gq, text); });
  section("sweep", [&](Reader& r) {
    SweepConfig s;
    read_sweep(r, s);
    cfg.sweep = s;
  });
  top.finish();
  cfg.raw = doc;
  return cfg;
}

RunConfig parse_config(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ConfigError("empty configuration");
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    const Location loc = location_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    // Drop the library prefix; keep the reason.
    if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigError(msg, loc.line, loc.column);
  }
  return parse_config(doc, text);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void check_preconditions(const RunConfig& cfg, Experiment e) {
  const bool cyl = cfg.grid.symmetry == "cylindrical";
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  switch (e) {
    case Experiment::groundstate:
    case Experiment::constants:
      break;
    case Experiment::evolve:
    case Experiment::gq_run:
      need(!cfg.integrator_snapshot_only, "integrator.t_end must be positive for " + std::string(experiment_name(e)));
      [[fallthrough]];
    case Experiment::virial_check:
      if (cfg.profile.kind == "radial") need(!cyl, "profile.kind radial needs grid.symmetry radial");
      if (cfg.profile.kind == "cylindrical") need(cyl, "profile.kind cylindrical needs grid.symmetry cylindrical");
      if (cfg.initial.family == "ground_state" || cfg.initial.family == "standing_wave") {
        need(cfg.dimension <= 5, "ground-state data needs dimension 4 or 5");
      }
      if (e == Experiment::virial_check) need(cfg.profile.kind != "none", "virial-check needs a profile");
      break;
    case Experiment::cutoff_check:
      need(cfg.profile.kind == "radial" || cfg.profile.kind == "cylindrical", "cutoff-check needs profile.kind radial or cylindrical");
      need(cfg.profile.R > 1.0, "cutoff-check needs profile.R > 1");
      break;
    case Experiment::classify:
      need(cfg.dimension == 5 || cfg.dimension == 6, "classify needs dimension 5 or 6");
      break;
    case Experiment::sweep:
      need(cfg.sweep.has_value(), "sweep needs a sweep section");
      break;
  }
}

void set_path(json& doc, const std::string& dotted, double value) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted);
  for (std::string p; std::getline(ss, p, '.');) {
    if (p.empty()) throw ConfigError("parameter path '" + dotted + "' has an empty segment");
    parts.push_back(p);
  }
  if (parts.empty()) throw ConfigError("empty parameter path");
  json* node = &doc;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    const bool last = i + 1 == parts.size();
    if (node->is_array()) {
      const bool numeric = p.find_first_not_of("0123456789") == std::string::npos;
      if (!numeric) throw ConfigError("parameter path '" + dotted + "': '" + p + "' must index an array");
      const std::size_t k = std::stoul(p);
      if (k >= node->size()) throw ConfigError("parameter path '" + dotted + "': index " + p + " out of range");
      node = &(*node)[k];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ConfigError("parameter path '" + dotted + "': '" + p + "' is below a non-object");
      node = &(*node)[p];
    }
    if (last) *node = value;
  }
}

}  // namespace qnls::cli
