#pragma once

#include "oddchern/invariants.hpp"
#include "oddchern/models.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace oddchern {

inline constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A single run or sweep request. The same config plus master seed always produces
// byte-identical CSV output (rows are canonically sorted before emission).
struct RunConfig {
  // Model selection: a builtin name with parameters, or an inline JSON document
  // (kept as its serialized form).
  std::string model_name = "model1";
  double m = 0.0;
  double lambda = 0.0;
  double lambda_prime = 0.0;
  std::string inline_model_json;  // non-empty when a custom document is given

  int L = 64;
  int ensemble = 1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> methods = {"realspace"};
  int trunc_radius = 0;  // 0 = L/4
  double trace_region = 0.5;
  int kgrid = 256;
  std::vector<double> x0;  // empty = (1/2, ..., 1/2)

  std::string sweep_parameter;  // "m" | "lambda" | "lambda_prime" (empty = single point)
  std::vector<double> sweep_values;

  double residual_tol = 0.1;
  double imag_tol = 0.05;
  double gap_tol = 1e-8;
  std::string output_dir = "results";
  bool diagnostics = false;  // add decay/fracmom rates per sweep point

  static RunConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;  // canonical echo
  std::string canonical_dump() const;
  std::uint64_t config_hash() const;

  // Builds the model at one sweep value (ignored for single-point runs).
  HoppingModel make_model(double sweep_value) const;
  void validate() const;
};

// Parses "a:b:step" or "a,b,c" into a value list.
std::vector<double> parse_value_list(const std::string& text);

struct ResultRow {
  std::string method;
  int d = 1;
  int L = 0;
  double m = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double value = 0.0;
  long nearest_int = 0;
  double residual = 0.0;
  double imag_leak = 0.0;
  int trunc_radius = 0;
  double gap = 0.0;
};

struct RunOutput {
  std::vector<ResultRow> rows;
  std::string summary_json;  // pretty-printed summary document
  long rejected_total = 0;
};

// Executes the run/sweep described by the config (all requested methods over the
// ensemble at every sweep point) and returns the result rows plus a summary.
RunOutput execute_run(const RunConfig& config);

// Canonical CSV with header:
// method,d,L,m,lambda,seed,value,nearest_int,residual,imag_leak,trunc_radius,gap
std::string results_csv(std::vector<ResultRow> rows);

// Writes results.csv, summary.json and provenance.json under the output directory
// (honoring the ODDCHERN_OUTPUT_DIR override); returns the directory used.
std::string write_outputs(const RunConfig& config, const RunOutput& output);

}  // namespace oddchern
