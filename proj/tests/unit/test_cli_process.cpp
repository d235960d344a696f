#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("qnls_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

int qnls(const std::string& args, const std::string& tag) {
  const std::string cmd = std::string(QNLS_BIN) + " " + args + " > " + (scratch() / (tag + ".stdout")).string() + " 2> " +
                          (scratch() / (tag + ".stderr")).string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

}  // namespace

TEST_CASE("usage errors exit with status 2") {
  const auto empty = write("empty.json", "");
  CHECK(qnls("evolve --config " + empty.string() + " --out " + (scratch() / "o1").string(), "empty") == 2);
  CHECK(slurp(scratch() / "empty.stderr").find("empty configuration") != std::string::npos);

  const auto typo = write("typo.json", "{\n  \"schema_version\": 1,\n  \"kapa\": 1\n}\n");
  CHECK(qnls("constants --config " + typo.string(), "typo") == 2);
  CHECK(slurp(scratch() / "typo.stderr").find(":3:") != std::string::npos);

  const auto other = write("other.json", R"({"schema_version": 1, "experiment": "constants"})");
  CHECK(qnls("evolve --config " + other.string(), "other") == 2);
  CHECK(qnls("constants", "noconfig") == 2);
  CHECK(qnls("", "nosub") == 2);
}

TEST_CASE("module errors exit with status 1 and still write a manifest") {
  const auto cfg = write("gn.json", R"({"schema_version": 1, "dimension": 4, "grid": {"r_max": 8, "n": 64},
    "integrator": {"dt0": 0.01, "t_end": 0.02}, "gq": {"gn_samples": 3}})");
  const fs::path out = scratch() / "gn";
  CHECK(qnls("gq-run --config " + cfg.string() + " --out " + out.string(), "gn") == 1);
  CHECK(slurp(out / "manifest.json").find("\"status\": \"error\"") != std::string::npos);
}

TEST_CASE("identical configs give byte-identical artifacts") {
  const std::string cfg = std::string(QNLS_CONFIG_DIR) + "/gq_snls.json";
  const fs::path a = scratch() / "det_a", b = scratch() / "det_b";
  REQUIRE(qnls("gq-run --config " + cfg + " --out " + a.string(), "det_a") == 0);
  REQUIRE(qnls("gq-run --config " + cfg + " --out " + b.string(), "det_b") == 0);
  for (const char* f : {"manifest.json", "series.csv"}) {
    const std::string x = slurp(a / f);
    CHECK(!x.empty());
    CHECK(x == slurp(b / f));
  }
}

TEST_CASE("a single-point sweep is identical to the plain run") {
  const auto direct = write("direct.json", R"({"schema_version": 1, "experiment": "cutoff-check", "dimension": 4,
    "profile": {"kind": "cylindrical", "R": 12.0}, "seed": 5})");
  const auto sweep = write("sweep.json", R"({"schema_version": 1, "experiment": "sweep", "dimension": 4,
    "profile": {"kind": "cylindrical", "R": 3.0}, "seed": 5,
    "sweep": {"experiment": "cutoff-check", "parameter": "profile.R", "values": [12.0]}})");
  const fs::path d = scratch() / "direct", s = scratch() / "sweep";
  REQUIRE(qnls("cutoff-check --config " + direct.string() + " --out " + d.string(), "direct") == 0);
  REQUIRE(qnls("sweep --threads 2 --config " + sweep.string() + " --out " + s.string(), "sweep") == 0);
  CHECK(slurp(d / "manifest.json") == slurp(s / "point_0000" / "manifest.json"));
  CHECK(slurp(d / "scan.csv") == slurp(s / "point_0000" / "scan.csv"));
  CHECK(fs::exists(s / "summary.csv"));
}

TEST_CASE("sweeps report failed points and exit 1") {
  const auto cfg = write("bad_sweep.json", R"({"schema_version": 1, "experiment": "sweep", "dimension": 4,
    "profile": {"kind": "radial", "R": 3.0},
    "sweep": {"experiment": "cutoff-check", "parameter": "profile.R", "values": [0.5, 12.0]}})");
  const fs::path out = scratch() / "bad_sweep";
  CHECK(qnls("sweep --config " + cfg.string() + " --out " + out.string(), "bad_sweep") == 1);
  const std::string m = slurp(out / "manifest.json");
  CHECK(m.find("partial_failure") != std::string::npos);
  CHECK(m.find("\"index\": 0") != std::string::npos);
  const std::string csv = slurp(out / "summary.csv");
  CHECK(csv.find("0,0.5,error") != std::string::npos);
  CHECK(csv.find("1,12,ok") != std::string::npos);
}
