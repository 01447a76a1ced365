// oddchern CLI: topological invariants of chiral tight-binding lattice models.
//
// Subcommands:
//   run                single run (all requested methods over the ensemble)
//   sweep              parameter sweep over m / lambda / lambda_prime
//   verify-identities  Clifford algebra and geometric identity checks
//   decay              flat band decay profile of a disorder ensemble
//   fracmom            fractional moments of the Green function

#include "oddchern/clifford.hpp"
#include "oddchern/ensemble.hpp"
#include "oddchern/rng.hpp"
#include "oddchern/localization.hpp"
#include "oddchern/model_io.hpp"
#include "oddchern/runconfig.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace oddchern;
using nlohmann::json;

namespace {

struct CommonModelArgs {
  std::string config_path;
  std::string model = "model1";
  std::string model_file;
  double m = 0.5;
  double lambda = 0.0;
  double lambda_prime = 0.0;
  int L = 64;
  int ensemble = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir = "results";
  int threads = 0;
};

void add_model_flags(CLI::App* cmd, CommonModelArgs& args, bool seed_required) {
  cmd->add_option("--model", args.model, "builtin model name (model1 | model2 | model3d)");
  cmd->add_option("--model-file", args.model_file, "JSON model document");
  cmd->add_option("--m", args.m, "mass parameter");
  cmd->add_option("--lambda", args.lambda, "bond disorder coupling");
  cmd->add_option("--lambda-prime", args.lambda_prime, "mass disorder coupling");
  cmd->add_option("--L", args.L, "linear lattice size");
  cmd->add_option("--ensemble", args.ensemble, "number of disorder realizations");
  auto* seed = cmd->add_option("--seed", args.seed, "master seed");
  if (seed_required) seed->required();
  seed->each([&args](const std::string&) { args.seed_given = true; });
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--threads", args.threads, "worker threads (0 = auto)");
}

RunConfig config_from_args(const CommonModelArgs& args) {
  RunConfig cfg;
  cfg.model_name = args.model;
  cfg.m = args.m;
  cfg.lambda = args.lambda;
  cfg.lambda_prime = args.lambda_prime;
  if (!args.model_file.empty()) {
    std::ifstream is(args.model_file);
    if (!is) throw ConfigError("cannot open model file: " + args.model_file);
    json doc = json::parse(is);
    cfg.inline_model_json = doc.dump();
    cfg.model_name = doc.value("name", std::string("custom"));
  }
  cfg.L = args.L;
  cfg.ensemble = args.ensemble;
  cfg.seed = args.seed;
  cfg.seed_set = args.seed_given;
  cfg.output_dir = args.out_dir;
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    // byte offset is the best we get from the parser; report it verbatim
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return RunConfig::from_json(doc);
}

int run_and_write(const RunConfig& cfg) {
  const RunOutput out = execute_run(cfg);
  const std::string dir = write_outputs(cfg, out);
  std::cout << "wrote " << out.rows.size() << " result rows to " << dir << "/results.csv";
  if (out.rejected_total > 0) std::cout << " (" << out.rejected_total << " gapless samples skipped)";
  std::cout << "\n";
  return 0;
}

int cmd_verify_identities(int d, int trials, std::uint64_t seed, std::size_t samples) {
  int failures = 0;
  const auto check = [&](const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "ok   " : "FAIL ") << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  };

  const CliffordRep rep = build_clifford(d);
  check("anticommutation", rep.anticommutation_residual() < 1e-12);
  check("hermiticity", rep.hermiticity_residual() < 1e-12);
  check("product convention", rep.product_convention_residual() < 1e-12);

  // Trace identities on full products.
  {
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i + 1;
    const cplx expect = std::pow(cplx(0.0, -2.0), (d - 1) / 2);
    const cplx got = clifford_trace_product(rep, idx);
    check("trace of ordered product", std::abs(got - expect * double(1)) < 1e-10);
  }

  // Determinant oracle for the sigma-dot trace on random tuples.
  RngStream rng{SplitRng::keyed(seed, 0x76657269ull)};
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<RealVec> ys(d, RealVec(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) ys[i](j) = 2.0 * rng.uniform() - 1.0;
    RealMat m(d, d);
    for (int i = 0; i < d; ++i) m.col(i) = ys[i];
    const cplx expect = std::pow(cplx(0.0, -2.0), (d - 1) / 2) * m.determinant();
    const cplx got = trace_sigma_dot(rep, ys);
    worst = std::max(worst, std::abs(got - expect) / std::max(1.0, std::abs(expect)));
  }
  check("sigma-dot trace vs determinant", worst < 1e-9,
        "worst rel err " + std::to_string(worst));

  // Geometric identity: Monte Carlo integral against the closed form.
  int degenerate = 0;
  double worst_sigma = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<RealVec> xs(d, RealVec(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) xs[i](j) = 2.0 * rng.uniform() - 1.0;
    const Simplex simplex = Simplex::from_points(xs);
    if (simplex.near_degenerate()) {
      ++degenerate;
      continue;
    }
    McIntegrationParams params;
    params.samples = samples;
    params.seed = seed + 1000 + t;
    const McEstimate lhs = key_identity_lhs(rep, xs, params);
    const cplx rhs = key_identity_rhs(xs);
    const double err = std::abs(lhs.value - rhs);
    const double sigma = err / std::max(lhs.std_error + lhs.tail_bound, 1e-300);
    worst_sigma = std::max(worst_sigma, sigma);
  }
  check("geometric identity (MC vs closed form)", worst_sigma < 3.0,
        "worst deviation " + std::to_string(worst_sigma) + " sigma, " +
            std::to_string(degenerate) + " degenerate simplices skipped");

  std::cout << (failures == 0 ? "all identity checks passed\n"
                              : "identity checks FAILED\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"odd Chern number / winding number toolkit for chiral lattice models"};
  app.require_subcommand(1);

  // --- run ---
  CommonModelArgs run_args;
  std::vector<std::string> run_methods = {"realspace"};
  int run_trunc = 0;
  double run_trace_region = 0.5;
  int run_kgrid = 256;
  auto* run_cmd = app.add_subcommand("run", "single run over a disorder ensemble");
  run_cmd->add_option("--config", run_args.config_path, "JSON config file (overrides flags)");
  add_model_flags(run_cmd, run_args, false);
  run_cmd->add_option("--methods", run_methods, "kspace | realspace | fedosov");
  run_cmd->add_option("--trunc-radius", run_trunc, "index truncation radius (0 = L/4)");
  run_cmd->add_option("--trace-region", run_trace_region, "central trace fraction");
  run_cmd->add_option("--kgrid", run_kgrid, "k-points per axis");

  // --- sweep ---
  CommonModelArgs sweep_args;
  std::vector<std::string> sweep_methods = {"realspace"};
  std::string sweep_param = "lambda";
  std::string sweep_values = "0:1:0.25";
  bool sweep_diag = false;
  int sweep_trunc = 0;
  double sweep_trace_region = 0.5;
  int sweep_kgrid = 256;
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep m / lambda / lambda_prime");
  sweep_cmd->add_option("--config", sweep_args.config_path, "JSON config file (overrides flags)");
  add_model_flags(sweep_cmd, sweep_args, true);
  sweep_cmd->add_option("--methods", sweep_methods, "kspace | realspace | fedosov");
  sweep_cmd->add_option("--param", sweep_param, "sweep parameter (m | lambda | lambda_prime)");
  sweep_cmd->add_option("--values", sweep_values, "start:end:step or comma list");
  sweep_cmd->add_option("--trunc-radius", sweep_trunc, "index truncation radius (0 = L/4)");
  sweep_cmd->add_option("--trace-region", sweep_trace_region, "central trace fraction");
  sweep_cmd->add_option("--kgrid", sweep_kgrid, "k-points per axis");
  sweep_cmd->add_flag("--diagnostics", sweep_diag, "add decay and fractional-moment rates");

  // --- verify-identities ---
  int vi_d = 3;
  int vi_trials = 10;
  std::uint64_t vi_seed = 1;
  std::size_t vi_samples = 2000000;
  auto* vi_cmd = app.add_subcommand("verify-identities", "Clifford and geometric identity checks");
  vi_cmd->add_option("--d", vi_d, "odd dimension");
  vi_cmd->add_option("--trials", vi_trials, "random trials per check");
  vi_cmd->add_option("--seed", vi_seed, "random seed");
  vi_cmd->add_option("--samples", vi_samples, "Monte Carlo samples per integral");

  // --- decay ---
  CommonModelArgs decay_args;
  auto* decay_cmd = app.add_subcommand("decay", "flat band decay profile");
  add_model_flags(decay_cmd, decay_args, true);

  // --- fracmom ---
  CommonModelArgs fm_args;
  double fm_E = 0.0, fm_s = 0.5, fm_eta = 1e-3;
  auto* fm_cmd = app.add_subcommand("fracmom", "Green function fractional moments");
  add_model_flags(fm_cmd, fm_args, true);
  fm_cmd->add_option("--E", fm_E, "energy");
  fm_cmd->add_option("--s", fm_s, "fractional power in (0,1)");
  fm_cmd->add_option("--eta", fm_eta, "imaginary regularization");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      set_default_thread_count(run_args.threads);
      RunConfig cfg;
      if (!run_args.config_path.empty()) {
        cfg = load_config_file(run_args.config_path);
      } else {
        cfg = config_from_args(run_args);
        cfg.methods = run_methods;
        cfg.trunc_radius = run_trunc;
        cfg.trace_region = run_trace_region;
        cfg.kgrid = run_kgrid;
        cfg.validate();
      }
      return run_and_write(cfg);
    }

    if (sweep_cmd->parsed()) {
      set_default_thread_count(sweep_args.threads);
      RunConfig cfg;
      if (!sweep_args.config_path.empty()) {
        cfg = load_config_file(sweep_args.config_path);
      } else {
        cfg = config_from_args(sweep_args);
        cfg.methods = sweep_methods;
        cfg.sweep_parameter = sweep_param;
        cfg.sweep_values = parse_value_list(sweep_values);
        cfg.trunc_radius = sweep_trunc;
        cfg.trace_region = sweep_trace_region;
        cfg.kgrid = sweep_kgrid;
        cfg.diagnostics = sweep_diag;
        cfg.validate();
      }
      return run_and_write(cfg);
    }

    if (vi_cmd->parsed()) return cmd_verify_identities(vi_d, vi_trials, vi_seed, vi_samples);

    if (decay_cmd->parsed()) {
      set_default_thread_count(decay_args.threads);
      const RunConfig cfg = config_from_args(decay_args);
      const HoppingModel model = cfg.make_model(0.0);
      EnsembleDraw draw = draw_ensemble(model, cfg.L, cfg.ensemble, cfg.seed);
      if (draw.samples.empty()) {
        std::cerr << "no gapped samples drawn\n";
        return 1;
      }
      std::vector<FlatBand> fbs;
      for (EnsembleSample& s : draw.samples) fbs.push_back(std::move(s.flat_band));
      const DecayProfile profile = decay_profile(fbs);

      std::string dir = cfg.output_dir;
      if (const char* env = std::getenv("ODDCHERN_OUTPUT_DIR"); env && *env) dir = env;
      std::filesystem::create_directories(dir);
      std::ofstream os(dir + "/decay.csv", std::ios::binary);
      profile.write_csv(os);
      json summary = {{"rate", profile.rate},
                      {"intercept", profile.intercept},
                      {"r_squared", profile.r_squared},
                      {"fit_skipped", profile.fit_skipped},
                      {"rejected", draw.rejected}};
      std::ofstream js(dir + "/decay_summary.json", std::ios::binary);
      js << summary.dump(2) << "\n";
      std::cout << "decay rate " << profile.rate << " (R^2 " << profile.r_squared << "), wrote "
                << dir << "/decay.csv\n";
      return 0;
    }

    if (fm_cmd->parsed()) {
      set_default_thread_count(fm_args.threads);
      const RunConfig cfg = config_from_args(fm_args);
      const HoppingModel model = cfg.make_model(0.0);
      EnsembleDraw draw = draw_ensemble(model, cfg.L, cfg.ensemble, cfg.seed);
      if (draw.realizations.empty()) {
        std::cerr << "no samples drawn\n";
        return 1;
      }
      const FracMomentReport rep =
          fractional_moment_fit(draw.realizations, fm_E, fm_s, fm_eta);

      std::string dir = cfg.output_dir;
      if (const char* env = std::getenv("ODDCHERN_OUTPUT_DIR"); env && *env) dir = env;
      std::filesystem::create_directories(dir);
      std::ofstream os(dir + "/fracmom.csv", std::ios::binary);
      rep.write_csv(os);
      json summary = {{"s", rep.s},       {"E", rep.energy},
                      {"eta", rep.eta},   {"beta_s", rep.rate},
                      {"log_C_s", rep.log_constant}, {"r_squared", rep.r_squared},
                      {"decay_detected", rep.decay_detected}};
      std::ofstream js(dir + "/fracmom_summary.json", std::ios::binary);
      js << summary.dump(2) << "\n";
      std::cout << "beta_s " << rep.rate << " (R^2 " << rep.r_squared << "), wrote " << dir
                << "/fracmom.csv\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
