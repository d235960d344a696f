#include <doctest.h>

#include "qnls_cli/config.hpp"
#include "qnls_cli/output.hpp"

using namespace qnls::cli;

namespace {
int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}
}  // namespace

TEST_CASE("minimal config gets defaults") {
  const auto c = parse_config(R"({"schema_version": 1})");
  CHECK(c.dimension == 4);
  CHECK(c.kappa == 1.0);
  CHECK(c.grid.symmetry == "radial");
  CHECK_FALSE(c.experiment.has_value());
}

TEST_CASE("validation failures carry the line of the offending key") {
  CHECK(error_line("") == 0);
  CHECK_THROWS_AS(parse_config(""), ConfigError);
  CHECK(error_line("{\n  \"schema_version\": 1,\n  \"dimenson\": 4\n}") == 3);
  CHECK(error_line("{\n  \"schema_version\": 2\n}") == 2);
  CHECK(error_line("{\n  \"schema_version\": 1,\n  \"grid\": {\n    \"n\": -5\n  }\n}") == 4);
  CHECK(error_line("{\n  \"schema_version\": 1,\n  \"units\": \"SI\"\n}") == 3);
  CHECK(error_line("{\n  \"schema_version\": 1,\n  \"kappa\": \n}") == 4);
  CHECK_THROWS_AS(parse_config(R"({"dimension": 4})"), ConfigError);
}

TEST_CASE("preconditions per experiment") {
  auto c = parse_config(R"({"schema_version": 1, "dimension": 4})");
  CHECK_THROWS_AS(check_preconditions(c, Experiment::classify), ConfigError);
  CHECK_NOTHROW(check_preconditions(c, Experiment::constants));
  c.grid.symmetry = "cylindrical";
  CHECK_THROWS_AS(check_preconditions(c, Experiment::virial_check), ConfigError);
}

TEST_CASE("set_path edits nested values") {
  nlohmann::json doc = nlohmann::json::parse(R"({"a": {"b": [1, 2]}})");
  set_path(doc, "a.b.1", 5.0);
  set_path(doc, "x.y", 3.0);
  CHECK(doc["a"]["b"][1] == 5.0);
  CHECK(doc["x"]["y"] == 3.0);
  CHECK_THROWS_AS(set_path(doc, "a.b.7", 1.0), ConfigError);
  CHECK_THROWS_AS(set_path(doc, "a..b", 1.0), ConfigError);
}

TEST_CASE("experiment names round-trip") {
  for (Experiment e : {Experiment::groundstate, Experiment::evolve, Experiment::virial_check, Experiment::cutoff_check, Experiment::classify,
                       Experiment::constants, Experiment::gq_run, Experiment::sweep}) {
    CHECK(parse_experiment(experiment_name(e)) == e);
  }
  CHECK_FALSE(parse_experiment("bogus").has_value());
}

TEST_CASE("deterministic serialization") {
  CHECK(fmt(0.1) == "0.10000000000000001");
  CHECK(fmt(1.0 / 0.0) == "inf");
  CHECK(dump_json({{"b", 1}, {"a", 0.5}}, 0) == R"({"a":0.5,"b":1})");
  CHECK(dump_json({{"x", std::nan("")}}, 0) == R"({"x":null})");
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
  const auto a = nlohmann::json::parse(R"({"x": 1, "y": [1, 2]})");
  const auto b = nlohmann::json::parse("{\"y\":[1,2],\n\"x\":1}");
  CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("CSV rows must match the header") {
  CsvTable t({"a", "b"});
  t.add({1.0, 0.25});
  CHECK(t.str() == "a,b\n1,0.25\n");
  CHECK_THROWS(t.add({1.0}));
}
