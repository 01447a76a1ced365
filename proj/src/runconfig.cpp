#include "oddchern/runconfig.hpp"

#include "oddchern/clifford.hpp"
#include "oddchern/ensemble.hpp"
#include "oddchern/localization.hpp"
#include "oddchern/model_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace oddchern {

using nlohmann::json;

namespace {

const std::set<std::string> kMethods = {"kspace", "realspace", "fedosov"};
const std::set<std::string> kSweepParams = {"m", "lambda", "lambda_prime"};

double require_number(const json& doc, const std::string& key, double fallback,
                      bool required = false) {
  if (!doc.contains(key)) {
    if (required) throw ConfigError("config." + key + ": missing required field");
    return fallback;
  }
  if (!doc.at(key).is_number())
    throw ConfigError("config." + key + ": expected a number");
  return doc.at(key).get<double>();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    double a = 0, b = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
      throw ConfigError("value range must be start:end:step with step > 0");
    for (double v = a; v <= b + 1e-12; v += step) values.push_back(v);
    return values;
  }
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    values.push_back(std::stod(tok));
  }
  if (values.empty()) throw ConfigError("empty value list");
  return values;
}

RunConfig RunConfig::from_json(const json& doc) {
  RunConfig cfg;
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");

  if (doc.contains("model")) {
    const json& m = doc.at("model");
    if (m.is_string()) {
      cfg.model_name = m.get<std::string>();
    } else if (m.is_object() && m.contains("dimension")) {
      cfg.model_name = m.value("name", std::string("custom"));
      cfg.inline_model_json = m.dump();
    } else if (m.is_object()) {
      cfg.model_name = m.value("name", std::string("model1"));
      cfg.m = require_number(m, "m", 0.0);
      cfg.lambda = require_number(m, "lambda", 0.0);
      cfg.lambda_prime = require_number(m, "lambda_prime", 0.0);
    } else {
      throw ConfigError("config.model: expected a name or an object");
    }
  }

  cfg.L = static_cast<int>(require_number(doc, "L", cfg.L));
  cfg.ensemble = static_cast<int>(require_number(doc, "ensemble", cfg.ensemble));
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer())
      throw ConfigError("config.seed: expected an integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
    cfg.seed_set = true;
  }
  if (doc.contains("methods")) {
    if (!doc.at("methods").is_array()) throw ConfigError("config.methods: expected an array");
    cfg.methods.clear();
    for (const json& m : doc.at("methods")) cfg.methods.push_back(m.get<std::string>());
  }
  cfg.trunc_radius = static_cast<int>(require_number(doc, "trunc_radius", 0));
  cfg.trace_region = require_number(doc, "trace_region", cfg.trace_region);
  cfg.kgrid = static_cast<int>(require_number(doc, "kgrid", cfg.kgrid));
  if (doc.contains("x0")) {
    if (!doc.at("x0").is_array()) throw ConfigError("config.x0: expected an array");
    for (const json& v : doc.at("x0")) cfg.x0.push_back(v.get<double>());
  }
  if (doc.contains("sweep")) {
    const json& sw = doc.at("sweep");
    if (!sw.is_object() || !sw.contains("parameter") || !sw.contains("values"))
      throw ConfigError("config.sweep: expected {parameter, values}");
    cfg.sweep_parameter = sw.at("parameter").get<std::string>();
    if (sw.at("values").is_string())
      cfg.sweep_values = parse_value_list(sw.at("values").get<std::string>());
    else
      for (const json& v : sw.at("values")) cfg.sweep_values.push_back(v.get<double>());
  }
  if (doc.contains("tolerances")) {
    const json& tol = doc.at("tolerances");
    cfg.residual_tol = require_number(tol, "residual", cfg.residual_tol);
    cfg.imag_tol = require_number(tol, "imag_leak", cfg.imag_tol);
    cfg.gap_tol = require_number(tol, "gap", cfg.gap_tol);
  }
  if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
  cfg.diagnostics = doc.value("diagnostics", false);
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  if (L < 3) throw ConfigError("config.L: must be at least 3");
  if (ensemble < 1) throw ConfigError("config.ensemble: must be at least 1");
  if (methods.empty()) throw ConfigError("config.methods: at least one method required");
  for (const std::string& m : methods)
    if (!kMethods.count(m))
      throw ConfigError("config.methods: unknown method '" + m +
                        "' (use kspace | realspace | fedosov)");
  if (!sweep_parameter.empty() && !kSweepParams.count(sweep_parameter))
    throw ConfigError("config.sweep.parameter: must be m, lambda or lambda_prime");
  if (!sweep_parameter.empty() && sweep_values.empty())
    throw ConfigError("config.sweep.values: empty");
  if (trace_region <= 0.0 || trace_region > 1.0)
    throw ConfigError("config.trace_region: must lie in (0, 1]");
  if (kgrid < 5) throw ConfigError("config.kgrid: too small");
  if (ensemble > 1 && !seed_set)
    throw ConfigError("config.seed: required for ensemble runs");
}

HoppingModel RunConfig::make_model(double sweep_value) const {
  double mm = m, ll = lambda, lp = lambda_prime;
  if (sweep_parameter == "m") mm = sweep_value;
  if (sweep_parameter == "lambda") ll = sweep_value;
  if (sweep_parameter == "lambda_prime") lp = sweep_value;
  if (!inline_model_json.empty()) {
    HoppingModel model = model_from_json(json::parse(inline_model_json));
    return model;
  }
  return builtin_model(model_name, mm, ll, lp);
}

json RunConfig::to_json() const {
  json doc;
  if (!inline_model_json.empty())
    doc["model"] = json::parse(inline_model_json);
  else
    doc["model"] = {{"name", model_name}, {"m", m}, {"lambda", lambda},
                    {"lambda_prime", lambda_prime}};
  doc["L"] = L;
  doc["ensemble"] = ensemble;
  if (seed_set) doc["seed"] = seed;
  doc["methods"] = methods;
  doc["trunc_radius"] = trunc_radius;
  doc["trace_region"] = trace_region;
  doc["kgrid"] = kgrid;
  if (!x0.empty()) doc["x0"] = x0;
  if (!sweep_parameter.empty())
    doc["sweep"] = {{"parameter", sweep_parameter}, {"values", sweep_values}};
  doc["tolerances"] = {{"residual", residual_tol}, {"imag_leak", imag_tol}, {"gap", gap_tol}};
  doc["output_dir"] = output_dir;
  doc["diagnostics"] = diagnostics;
  return doc;
}

std::string RunConfig::canonical_dump() const { return to_json().dump(); }

std::uint64_t RunConfig::config_hash() const {
  const std::string dump = canonical_dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

ResultRow row_from_estimate(const InvariantEstimate& est, const HoppingModel& model, int L,
                            std::uint64_t seed) {
  ResultRow row;
  row.method = est.method;
  row.d = model.dimension;
  row.L = L;
  row.m = model.m;
  row.lambda = model.lambda;
  row.seed = seed;
  row.value = est.value;
  row.nearest_int = est.nearest_int;
  row.residual = est.residual;
  row.imag_leak = est.imag_leak;
  row.trunc_radius = est.trunc_radius;
  row.gap = est.gap;
  return row;
}

}  // namespace

RunOutput execute_run(const RunConfig& config) {
  config.validate();
  RunOutput out;
  json summary;
  summary["points"] = json::array();

  std::vector<double> sweep = config.sweep_values;
  if (sweep.empty()) sweep.push_back(0.0);  // single point

  const bool wants_kspace =
      std::count(config.methods.begin(), config.methods.end(), "kspace") > 0;
  const bool wants_realspace =
      std::count(config.methods.begin(), config.methods.end(), "realspace") > 0;
  const bool wants_fedosov =
      std::count(config.methods.begin(), config.methods.end(), "fedosov") > 0;

  for (double value : sweep) {
    const HoppingModel model = config.make_model(value);
    const int d = model.dimension;
    json point;
    point["m"] = model.m;
    point["lambda"] = model.lambda;
    point["lambda_prime"] = model.lambda_prime;
    if (!config.sweep_parameter.empty()) point[config.sweep_parameter] = value;

    if (wants_kspace) {
      // The momentum-space estimator addresses the clean restriction of the model.
      HoppingModel clean = model;
      clean.disorder = DisorderSpec{};
      clean.lambda = 0.0;
      clean.lambda_prime = 0.0;
      InvariantEstimate est = kspace_odd_chern(clean, config.kgrid);
      est.grid = config.kgrid;
      ResultRow row = row_from_estimate(est, model, config.L, config.seed);
      out.rows.push_back(row);
      point["kspace"] = {{"value", est.value}, {"nearest_int", est.nearest_int},
                         {"residual", est.residual}, {"gap", est.gap}};
    }

    if (wants_realspace || wants_fedosov) {
      EnsembleOptions opts;
      opts.gap_tol = config.gap_tol;
      EnsembleDraw draw = draw_ensemble(model, config.L, config.ensemble, config.seed, opts);
      out.rejected_total += draw.rejected;
      point["rejected"] = draw.rejected;
      point["accepted"] = draw.samples.size();

      const int trunc = config.trunc_radius > 0 ? config.trunc_radius : config.L / 4;
      RealVec x0(d);
      for (int i = 0; i < d; ++i)
        x0(i) = (static_cast<int>(config.x0.size()) == d) ? config.x0[i] : 0.5;

      std::vector<InvariantEstimate> real_estimates(draw.samples.size());
      std::vector<InvariantEstimate> fedosov_estimates(draw.samples.size());
      const CliffordRep rep = wants_fedosov ? build_clifford(d) : CliffordRep{};

      parallel_for(static_cast<long>(draw.samples.size()), [&](long i) {
        const FlatBand& fb = draw.samples[i].flat_band;
        if (wants_realspace)
          real_estimates[i] = realspace_odd_chern(fb, config.trace_region);
        if (wants_fedosov) {
          const DiracPhase phase = dirac_phase(fb.geom, x0, rep);
          fedosov_estimates[i] = fedosov_index(fb, phase, trunc);
        }
      });

      const auto emit = [&](const std::vector<InvariantEstimate>& ests, const char* tag) {
        for (std::size_t i = 0; i < ests.size(); ++i)
          out.rows.push_back(row_from_estimate(ests[i], model, config.L,
                                               draw.samples[i].sample_key));
        const InvariantStats st = summarize_estimates(ests);
        point[tag] = {{"n", st.n},
                      {"mean", st.mean},
                      {"std", st.stddev},
                      {"mode_int", st.mode_int},
                      {"mode_fraction", st.mode_fraction},
                      {"max_residual", st.max_residual},
                      {"max_imag_leak", st.max_imag_leak}};
      };
      if (wants_realspace) emit(real_estimates, "realspace");
      if (wants_fedosov) emit(fedosov_estimates, "fedosov");

      if (config.diagnostics && !draw.samples.empty()) {
        std::vector<FlatBand> fbs;
        fbs.reserve(draw.samples.size());
        for (const EnsembleSample& s : draw.samples) fbs.push_back(s.flat_band);
        const DecayProfile profile = decay_profile(fbs);
        point["decay_rate"] = profile.rate;
        point["decay_r_squared"] = profile.r_squared;
        if (draw.realizations.size() >= 20) {  // fractional moments need a real ensemble
          const FracMomentReport fm = fractional_moment_fit(draw.realizations, 0.0, 0.5, 1e-3);
          point["frac_rate"] = fm.rate;
          point["frac_r_squared"] = fm.r_squared;
        }
      }
    }
    summary["points"].push_back(std::move(point));
  }

  summary["rejected_total"] = out.rejected_total;
  out.summary_json = summary.dump(2) + "\n";
  return out;
}

std::string results_csv(std::vector<ResultRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.method, a.d, a.L, a.m, a.lambda, a.seed, a.trunc_radius) <
           std::tie(b.method, b.d, b.L, b.m, b.lambda, b.seed, b.trunc_radius);
  });
  std::string csv = "method,d,L,m,lambda,seed,value,nearest_int,residual,imag_leak,trunc_radius,gap\n";
  char buf[512];
  for (const ResultRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%s,%s,%llu,%s,%ld,%s,%s,%d,%s\n",
                  r.method.c_str(), r.d, r.L, format_double(r.m).c_str(),
                  format_double(r.lambda).c_str(),
                  static_cast<unsigned long long>(r.seed), format_double(r.value).c_str(),
                  r.nearest_int, format_double(r.residual).c_str(),
                  format_double(r.imag_leak).c_str(), r.trunc_radius,
                  format_double(r.gap).c_str());
    csv += buf;
  }
  return csv;
}

std::string write_outputs(const RunConfig& config, const RunOutput& output) {
  std::string dir = config.output_dir;
  if (const char* env = std::getenv("ODDCHERN_OUTPUT_DIR"); env && *env) dir = env;
  std::filesystem::create_directories(dir);

  {
    std::ofstream os(dir + "/results.csv", std::ios::binary);
    os << results_csv(output.rows);
  }
  {
    std::ofstream os(dir + "/summary.json", std::ios::binary);
    os << output.summary_json;
  }
  {
    json prov;
    prov["version"] = kVersion;
    prov["config"] = config.to_json();
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(config.config_hash()));
    prov["config_hash"] = hash;
    prov["master_seed"] = config.seed;
    std::ofstream os(dir + "/provenance.json", std::ios::binary);
    os << prov.dump(2) << "\n";
  }
  return dir;
}

}  // namespace oddchern
