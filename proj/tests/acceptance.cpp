// Acceptance suite: one numbered criterion per function, each printing a single
// PASS/FAIL line with the measured numbers. Exit status is the failure count.
//
//   acceptance            runs everything
//   acceptance --only N   runs one criterion

#include "oddchern/clifford.hpp"
#include "oddchern/ensemble.hpp"
#include "oddchern/invariants.hpp"
#include "oddchern/localization.hpp"
#include "oddchern/models.hpp"

#include "oracles.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

using namespace oddchern;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += why;
    }
  }
  void note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// 1. Clean d=1 quantization: winding 1 inside the topological window, 0 outside,
//    residual < 1e-6 at grid 256.
Outcome criterion_1() {
  Outcome out;
  for (double m : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
    const InvariantEstimate est = kspace_odd_chern(model1(m), 256);
    out.require(est.nearest_int == 1 && est.residual < 1e-6,
                fmt("m=%.1f gave %ld (res %.2e)", m, est.nearest_int, est.residual));
  }
  for (double m : {1.5, 2.0, -2.0}) {
    const InvariantEstimate est = kspace_odd_chern(model1(m), 256);
    out.require(est.nearest_int == 0 && est.residual < 1e-6,
                fmt("m=%.1f gave %ld (res %.2e)", m, est.nearest_int, est.residual));
  }
  if (out.pass) out.note("winding 1 for |m|<1 and 0 for |m|>1, residuals < 1e-6");
  return out;
}

// 2. Gap closing at m = 1 +- 1e-3 on a 4096-point grid. The analytic minimum is
//    exactly 1e-3 at the on-grid momentum 3 pi/2, so the bound carries a relative
//    rounding guard of 1e-9.
Outcome criterion_2() {
  Outcome out;
  const int grid = 4096;
  for (double m : {1.0 - 1e-3, 1.0 + 1e-3}) {
    double lo = 1e300;
    const HoppingModel mod = model1(m);
    for (int j = 0; j < grid; ++j) {
      RealVec k = RealVec::Constant(1, 2.0 * std::numbers::pi * j / grid);
      Eigen::SelfAdjointEigenSolver<Mat> es(bloch_hamiltonian(mod, k));
      lo = std::min(lo, es.eigenvalues().cwiseAbs().minCoeff());
    }
    out.require(lo <= 1e-3 * (1.0 + 1e-9), fmt("m=%.4f min gap %.6e", m, lo));
    out.note(fmt("m=%.4f min|E| = %.8e", m, lo));
  }
  return out;
}

// 3. Real-space equals k-space for clean model1 at L=128 within 1e-3.
Outcome criterion_3() {
  Outcome out;
  for (double m : {0.5, 1.5}) {
    const InvariantEstimate kest = kspace_odd_chern(model1(m), 256);
    const FlatBand fb = spectral_flatband(realize(model1(m), 128, 1, 0));
    const InvariantEstimate rest = realspace_odd_chern(fb);
    const double diff = std::abs(rest.value - kest.value);
    out.require(diff < 1e-3, fmt("m=%.1f |realspace-kspace| = %.2e", m, diff));
    out.note(fmt("m=%.1f realspace %.6f vs kspace %ld", m, rest.value, kest.nearest_int));
  }
  return out;
}

// 4. Index theorem at desk scale: fedosov vs realspace on 10 seeded samples.
Outcome criterion_4() {
  Outcome out;
  const CliffordRep rep = build_clifford(1);
  double worst = 0.0;
  for (int r = 0; r < 10; ++r) {
    const LatticeRealization sample = realize(model2(0.5, 1.0, 0.0), 256, 2024, r);
    const FlatBand fb = spectral_flatband(sample);
    const DiracPhase phase = dirac_phase(fb.geom, RealVec::Constant(1, 0.5), rep);
    const InvariantEstimate fed = fedosov_index(fb, phase, 64);
    const InvariantEstimate real = realspace_odd_chern(fb);
    const double diff = std::abs(fed.value - real.value);
    worst = std::max(worst, diff);
    out.require(diff < 0.05, fmt("sample %d |fedosov-realspace| = %.3f", r, diff));
    out.require(fed.nearest_int == 1 && real.nearest_int == 1,
                fmt("sample %d rounded to (%ld, %ld)", r, fed.nearest_int, real.nearest_int));
  }
  if (out.pass) out.note(fmt("10 samples, worst |index - invariant| = %.2e", worst));
  return out;
}

// 5. Disorder plateau: lambda sweep at m=0.5, L=256, 50 samples per point.
Outcome criterion_5() {
  Outcome out;
  for (double lambda : {0.0, 0.5, 1.0, 1.5}) {
    EnsembleDraw draw = draw_ensemble(model2(0.5, lambda, 0.0), 256, 50, 77);
    std::vector<InvariantEstimate> ests(draw.samples.size());
    parallel_for(static_cast<long>(draw.samples.size()), [&](long i) {
      ests[i] = realspace_odd_chern(draw.samples[i].flat_band);
    });
    const InvariantStats st = summarize_estimates(ests);
    out.note(fmt("lambda=%.1f mode %ld at %.0f%%, std %.4f, rejected %ld", lambda,
                 st.mode_int, 100.0 * st.mode_fraction, st.stddev, draw.rejected));
    if (lambda <= 1.0) {
      out.require(st.n == 50, fmt("lambda=%.1f accepted only %ld samples", lambda, st.n));
      out.require(st.mode_int == 1 && st.mode_fraction == 1.0,
                  fmt("lambda=%.1f mode %ld fraction %.2f", lambda, st.mode_int,
                      st.mode_fraction));
      out.require(st.stddev < 0.05, fmt("lambda=%.1f std %.4f", lambda, st.stddev));
      out.require(st.max_imag_leak < 0.05,
                  fmt("lambda=%.1f imag leak %.2e", lambda, st.max_imag_leak));
    }
  }
  return out;
}

// 6. Dirac offset invariance of the index on a fixed localized sample.
Outcome criterion_6() {
  Outcome out;
  const CliffordRep rep = build_clifford(1);
  const FlatBand fb = spectral_flatband(realize(model2(0.5, 1.0, 0.0), 256, 99, 0));
  RngStream rng{SplitRng::keyed(4242, 0)};
  double lo = 1e300, hi = -1e300;
  for (int t = 0; t < 5; ++t) {
    const double x0 = rng.uniform();
    const DiracPhase phase = dirac_phase(fb.geom, RealVec::Constant(1, x0), rep);
    const double v = fedosov_index(fb, phase, 64).value;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out.require(hi - lo < 0.05, fmt("spread %.4f", hi - lo));
  out.note(fmt("5 offsets, spread %.2e around %.4f", hi - lo, 0.5 * (hi + lo)));
  return out;
}

// 7. Key geometric identity: Monte Carlo integral vs closed form, 10 simplices per
//    dimension, 3 sigma agreement and < 2% relative error at the default budget.
Outcome criterion_7() {
  Outcome out;
  for (int d : {1, 3}) {
    const CliffordRep rep = build_clifford(d);
    RngStream rng{SplitRng::keyed(7777, static_cast<std::uint64_t>(d))};
    double worst_rel = 0.0, worst_sigma = 0.0;
    for (int t = 0; t < 10; ++t) {
      const std::vector<RealVec> xs = oracles::random_conditioned_simplex(rng, d);
      McIntegrationParams params;
      params.seed = 31000 + 100 * d + t;
      const McEstimate lhs = key_identity_lhs(rep, xs, params);
      const cplx rhs = key_identity_rhs(xs);
      const double err = std::abs(lhs.value - rhs);
      const double sigma_band = 3.0 * lhs.std_error + lhs.tail_bound;
      const double rel = err / std::abs(rhs);
      worst_rel = std::max(worst_rel, rel);
      worst_sigma = std::max(worst_sigma, err / std::max(lhs.std_error, 1e-300));
      out.require(err <= sigma_band,
                  fmt("d=%d simplex %d off by %.2e vs band %.2e", d, t, err, sigma_band));
      out.require(rel < 0.02, fmt("d=%d simplex %d rel err %.3f", d, t, rel));
    }
    out.note(fmt("d=%d worst rel %.4f, worst %.2f sigma", d, worst_rel, worst_sigma));
  }
  return out;
}

// 8. Clifford identity suite: exhaustive words up to length 3 at d=3 against the
//    algebra oracle, sampled words at d=5; exact to 1e-10.
Outcome criterion_8() {
  Outcome out;
  const CliffordRep rep3 = build_clifford(3);
  double worst = 0.0;
  for (int len = 1; len <= 3; ++len) {
    std::vector<int> word(len, 1);
    for (;;) {
      const cplx got = clifford_trace_product(rep3, word);
      const cplx expect = oracles::trace_word(3, word);
      worst = std::max(worst, std::abs(got - expect));
      int pos = len - 1;
      while (pos >= 0 && word[pos] == 3) word[pos--] = 1;
      if (pos < 0) break;
      ++word[pos];
    }
  }
  out.require(worst <= 1e-10, fmt("d=3 exhaustive worst %.2e", worst));

  const CliffordRep rep5 = build_clifford(5);
  RngStream rng{SplitRng::keyed(88, 0)};
  double worst5 = 0.0;
  for (int t = 0; t < 60; ++t) {
    const int len = 1 + static_cast<int>(rng.uniform() * 5);
    std::vector<int> word(len);
    for (int& w : word) w = 1 + static_cast<int>(rng.uniform() * 5);
    worst5 = std::max(worst5,
                      std::abs(clifford_trace_product(rep5, word) - oracles::trace_word(5, word)));
  }
  out.require(worst5 <= 1e-10, fmt("d=5 sampled worst %.2e", worst5));
  out.require(rep3.anticommutation_residual() < 1e-12 &&
                  rep5.anticommutation_residual() < 1e-12,
              "anticommutation residual above 1e-12");
  out.require(rep3.product_convention_residual() < 1e-12 &&
                  rep5.product_convention_residual() < 1e-12,
              "product convention residual above 1e-12");
  if (out.pass)
    out.note(fmt("worst deviations: %.2e (d=3 exhaustive), %.2e (d=5 sampled)", worst, worst5));
  return out;
}

// 9. Summability ordering on a weakly localized chain: the p=2 Schatten sum of
//    [F, U] moves < 2% between R=48 and R=64 while the p=1 sum grows > 10%.
Outcome criterion_9() {
  Outcome out;
  const CliffordRep rep = build_clifford(1);
  const FlatBand fb = spectral_flatband(realize(model2(0.98, 0.1, 0.0), 192, 21, 0));
  const DiracPhase phase = dirac_phase(fb.geom, RealVec::Constant(1, 0.5), rep);
  const SummabilityTable tab = summability_diagnostic(fb, phase, 64);
  double p1_48 = 0, p1_64 = 0, p2_48 = 0, p2_64 = 0;
  for (std::size_t i = 0; i < tab.radii.size(); ++i) {
    if (tab.radii[i] == 48) { p1_48 = tab.sum_p_low[i]; p2_48 = tab.sum_p_high[i]; }
    if (tab.radii[i] == 64) { p1_64 = tab.sum_p_low[i]; p2_64 = tab.sum_p_high[i]; }
  }
  const double p1_growth = (p1_64 - p1_48) / p1_48;
  const double p2_change = std::abs(p2_64 - p2_48) / p2_48;
  out.require(p2_change < 0.02, fmt("p=2 change %.2f%%", 100.0 * p2_change));
  out.require(p1_growth > 0.10, fmt("p=1 growth %.2f%%", 100.0 * p1_growth));
  out.note(fmt("p=1 grows %.1f%%, p=2 moves %.2f%% (R 48 -> 64)", 100.0 * p1_growth,
               100.0 * p2_change));
  return out;
}

// 10. d=3 pipeline at L=10: real-space invariant rounds to the k-space cubature
//     integer in two distinct phases, residual < 0.1.
Outcome criterion_10() {
  Outcome out;
  long integers[2] = {0, 0};
  int i = 0;
  for (double m : {2.0, 0.0}) {
    const InvariantEstimate oracle = kspace_odd_chern(model3d_reference(m), 24);
    const FlatBand fb = spectral_flatband(realize(model3d_reference(m), 10, 1, 0));
    const InvariantEstimate est = realspace_odd_chern(fb);
    integers[i++] = oracle.nearest_int;
    out.require(est.nearest_int == oracle.nearest_int,
                fmt("m=%.1f realspace %ld vs oracle %ld", m, est.nearest_int,
                    oracle.nearest_int));
    out.require(est.residual < 0.1, fmt("m=%.1f residual %.3f", m, est.residual));
    out.note(fmt("m=%.1f realspace %.4f, oracle %ld", m, est.value, oracle.nearest_int));
  }
  out.require(integers[0] != integers[1], "the two m values fell in the same phase");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  using Criterion = Outcome (*)();
  const Criterion criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4,
                                criterion_5, criterion_6, criterion_7, criterion_8,
                                criterion_9, criterion_10};
  int failures = 0;
  for (int i = 0; i < 10; ++i) {
    if (only != 0 && only != i + 1) continue;
    const Outcome out = criteria[i]();
    std::printf("criterion %02d: %s - %s\n", i + 1, out.pass ? "PASS" : "FAIL",
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures;
}
