#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oddchern/ensemble.hpp"
#include "oddchern/runconfig.hpp"

#include <json.hpp>

using namespace oddchern;
using nlohmann::json;

TEST_CASE("config round trip through JSON") {
  json doc;
  doc["model"] = {{"name", "model2"}, {"m", 0.5}, {"lambda", 1.0}};
  doc["L"] = 64;
  doc["ensemble"] = 4;
  doc["seed"] = 9;
  doc["methods"] = {"realspace", "fedosov"};
  doc["sweep"] = {{"parameter", "lambda"}, {"values", {0.0, 0.5, 1.0}}};
  const RunConfig cfg = RunConfig::from_json(doc);
  CHECK(cfg.model_name == "model2");
  CHECK(cfg.L == 64);
  CHECK(cfg.sweep_values.size() == 3);
  CHECK(cfg.seed == 9);
  const RunConfig back = RunConfig::from_json(cfg.to_json());
  CHECK(back.canonical_dump() == cfg.canonical_dump());
  CHECK(back.config_hash() == cfg.config_hash());
}

TEST_CASE("config validation failures carry field paths") {
  json doc;
  doc["model"] = {{"name", "model1"}, {"m", 0.5}};
  doc["methods"] = {"psi-space"};
  try {
    (void)RunConfig::from_json(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("config.methods") != std::string::npos);
  }

  json no_seed;
  no_seed["model"] = {{"name", "model2"}, {"m", 0.5}, {"lambda", 1.0}};
  no_seed["ensemble"] = 10;
  CHECK_THROWS_AS((void)RunConfig::from_json(no_seed), ConfigError);
}

TEST_CASE("value list parsing: ranges and comma lists") {
  const std::vector<double> r = parse_value_list("0:2:0.5");
  REQUIRE(r.size() == 5);
  CHECK(r.front() == 0.0);
  CHECK(r.back() == 2.0);
  const std::vector<double> c = parse_value_list("0.1,0.7,0.3");
  REQUIRE(c.size() == 3);
  CHECK(c[1] == 0.7);
  CHECK_THROWS_AS(parse_value_list("1:0:-1"), ConfigError);
}

TEST_CASE("execute_run produces one row per sample and method") {
  RunConfig cfg;
  cfg.model_name = "model2";
  cfg.m = 0.5;
  cfg.lambda = 1.0;
  cfg.L = 32;
  cfg.ensemble = 3;
  cfg.seed = 4;
  cfg.seed_set = true;
  cfg.methods = {"kspace", "realspace"};
  cfg.kgrid = 64;
  const RunOutput out = execute_run(cfg);
  long kspace_rows = 0, realspace_rows = 0;
  for (const ResultRow& r : out.rows) {
    if (r.method == "kspace") ++kspace_rows;
    if (r.method == "realspace") ++realspace_rows;
    CHECK(r.L == 32);
    CHECK(r.nearest_int == 1);
  }
  CHECK(kspace_rows == 1);
  CHECK(realspace_rows == 3);
  CHECK(out.summary_json.find("mode_fraction") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical CSV") {
  RunConfig cfg;
  cfg.model_name = "model2";
  cfg.m = 0.5;
  cfg.lambda = 1.0;
  cfg.L = 32;
  cfg.ensemble = 4;
  cfg.seed = 11;
  cfg.seed_set = true;
  cfg.methods = {"realspace", "fedosov"};
  cfg.trunc_radius = 8;

  set_default_thread_count(1);
  const std::string csv_serial = results_csv(execute_run(cfg).rows);
  set_default_thread_count(2);
  const std::string csv_parallel = results_csv(execute_run(cfg).rows);
  set_default_thread_count(0);
  CHECK(csv_serial == csv_parallel);
  CHECK(!csv_serial.empty());

  // Different seed changes the numbers.
  cfg.seed = 12;
  CHECK(results_csv(execute_run(cfg).rows) != csv_serial);
}

TEST_CASE("CSV is canonically sorted with the documented header") {
  std::vector<ResultRow> rows(2);
  rows[0].method = "realspace";
  rows[0].seed = 5;
  rows[1].method = "fedosov";
  rows[1].seed = 2;
  const std::string csv = results_csv(rows);
  CHECK(csv.rfind("method,d,L,m,lambda,seed,value,nearest_int,residual,imag_leak,"
                  "trunc_radius,gap\n", 0) == 0);
  CHECK(csv.find("fedosov") < csv.find("realspace"));
}

TEST_CASE("sweep over lambda emits per-point summaries") {
  RunConfig cfg;
  cfg.model_name = "model2";
  cfg.m = 0.5;
  cfg.L = 24;
  cfg.ensemble = 2;
  cfg.seed = 3;
  cfg.seed_set = true;
  cfg.methods = {"realspace"};
  cfg.sweep_parameter = "lambda";
  cfg.sweep_values = {0.0, 1.0};
  const RunOutput out = execute_run(cfg);
  CHECK(out.rows.size() == 4);
  const json summary = json::parse(out.summary_json);
  REQUIRE(summary.at("points").size() == 2);
  CHECK(summary["points"][1]["lambda"] == 1.0);
  for (const auto& pt : summary.at("points"))
    CHECK(pt.at("realspace").at("mode_int") == 1);
}

TEST_CASE("empty sweep axis behaves as a single-point run") {
  RunConfig cfg;
  cfg.model_name = "model1";
  cfg.m = 0.5;
  cfg.L = 24;
  cfg.ensemble = 1;
  cfg.seed = 1;
  cfg.seed_set = true;
  cfg.methods = {"realspace"};
  const RunOutput out = execute_run(cfg);
  CHECK(out.rows.size() == 1);
  CHECK(json::parse(out.summary_json).at("points").size() == 1);
}

TEST_CASE("gapless samples are counted and skipped") {
  RunConfig cfg;
  cfg.model_name = "model1";  // clean m=1: every realization is gapless at L % 4 == 0
  cfg.m = 1.0;
  cfg.L = 32;
  cfg.ensemble = 2;
  cfg.seed = 1;
  cfg.seed_set = true;
  cfg.methods = {"realspace"};
  const RunOutput out = execute_run(cfg);
  CHECK(out.rows.empty());
  CHECK(out.rejected_total > 0);
}
