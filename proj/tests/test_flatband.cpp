#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oddchern/flatband.hpp"
#include "oddchern/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace oddchern;

namespace {

// One site, two orbitals, H = s1: already flat, so Q = H and U = 1.
LatticeRealization two_level_sample() {
  LatticeRealization s;
  s.geom = LatticeGeometry{1, 1, 2};
  s.hamiltonian = pauli(1);
  return s;
}

// Random gapped chiral Hamiltonian: off-diagonal block A with singular values in
// [gap, gap + 1] synthesized from a random SVD.
LatticeRealization random_chiral_sample(int sites, int half, double gap, std::uint64_t seed) {
  RngStream rng{SplitRng::keyed(seed, 0xab)};
  const long n = static_cast<long>(sites) * half;
  Mat g1(n, n), g2(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      g1(i, j) = cplx(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
      g2(i, j) = cplx(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    }
  const Mat w = Eigen::HouseholderQR<Mat>(g1).householderQ();
  const Mat v = Eigen::HouseholderQR<Mat>(g2).householderQ();
  RealVec sv(n);
  for (long i = 0; i < n; ++i) sv(i) = gap + rng.uniform();
  const Mat a = w * sv.asDiagonal() * v.adjoint();

  LatticeRealization s;
  s.geom = LatticeGeometry{1, sites, 2 * half};
  s.hamiltonian = Mat::Zero(2 * n, 2 * n);
  // Interleave site blocks so the chiral frame stays diag(1_half, -1_half) per site.
  for (int sx = 0; sx < sites; ++sx)
    for (int sy = 0; sy < sites; ++sy) {
      s.hamiltonian.block(sx * 2 * half, sy * 2 * half + half, half, half) =
          a.block(sx * half, sy * half, half, half);
      s.hamiltonian.block(sx * 2 * half + half, sy * 2 * half, half, half) =
          a.adjoint().block(sx * half, sy * half, half, half);
    }
  return s;
}

}  // namespace

TEST_CASE("trivial two-level sample: Q = H, U = 1, spectrum +-1") {
  const LatticeRealization s = two_level_sample();
  const FlatBand fb = spectral_flatband(s);
  CHECK(fb.gap == doctest::Approx(1.0));
  CHECK(max_abs(fb.flat_q - s.hamiltonian) < 1e-12);
  CHECK(fb.chiral_unitary.rows() == 1);
  CHECK(std::abs(fb.chiral_unitary(0, 0) - cplx(1.0, 0.0)) < 1e-12);
  CHECK(fb.flatness_residual < 1e-12);
  CHECK(fb.unitarity_residual < 1e-12);
}

TEST_CASE("flat band invariants on a disordered model2 sample") {
  const LatticeRealization s = realize(model2(0.5, 1.0, 0.0), 48, 21, 0);
  const FlatBand fb = spectral_flatband(s);
  CHECK(fb.flatness_residual < 1e-12);
  CHECK(fb.unitarity_residual < 1e-10);
  CHECK(fb.chirality_residual() < 1e-12);
  CHECK(hermiticity_residual(fb.flat_q) < 1e-12);
  CHECK(fb.gap > 0.0);
}

TEST_CASE("clean model1 gap matches the Bloch gap at L=64") {
  const HoppingModel mod = model1(0.5);
  const FlatBand fb = spectral_flatband(realize(mod, 64, 1, 0));
  double lo = 1e300;
  for (int j = 0; j < 64; ++j) {
    RealVec k = RealVec::Constant(1, 2.0 * std::numbers::pi * j / 64);
    Eigen::SelfAdjointEigenSolver<Mat> es(bloch_hamiltonian(mod, k));
    lo = std::min(lo, es.eigenvalues().cwiseAbs().minCoeff());
  }
  CHECK(fb.gap == doctest::Approx(lo).epsilon(1e-10));
  CHECK(fb.flatness_residual < 1e-12);
}

TEST_CASE("gapless sample raises GaplessSample") {
  // L divisible by 4 puts k = 3 pi/2 on the grid, where the m=1 gap closes exactly.
  const LatticeRealization s = realize(model1(1.0), 64, 1, 0);
  CHECK_THROWS_AS(spectral_flatband(s), GaplessSample);
}

TEST_CASE("contour route agrees with the spectral route") {
  const LatticeRealization s = random_chiral_sample(25, 1, 0.5, 7);
  const FlatBand spectral = spectral_flatband(s);
  const FlatBand contour = contour_flatband(s, 96);
  CHECK(max_abs(contour.flat_q - spectral.flat_q) < 1e-8);
  CHECK(contour.flatness_residual < 1e-8);
}

TEST_CASE("contour route on the trivial sample") {
  const LatticeRealization s = two_level_sample();
  const FlatBand fb = contour_flatband(s, 64);
  CHECK(max_abs(fb.flat_q - s.hamiltonian) < 1e-10);
}

TEST_CASE("contour quadrature error decreases with node count") {
  const LatticeRealization s = random_chiral_sample(20, 1, 0.5, 11);
  const FlatBand fine = spectral_flatband(s);
  double prev_err = 1e300;
  for (int nodes : {8, 16, 32, 64}) {
    const FlatBand fb = contour_flatband(s, nodes);
    const double err = max_abs(fb.flat_q - fine.flat_q);
    CHECK(err < prev_err + 1e-12);
    prev_err = err;
  }
  CHECK(prev_err < 1e-6);
}

TEST_CASE("contour route rejects gapless samples") {
  const LatticeRealization s = realize(model1(1.0), 64, 1, 0);
  CHECK_THROWS_AS(contour_flatband(s, 32), GaplessSample);
}

TEST_CASE("decay profile of a clean gapped chain is exponential") {
  const FlatBand fb = spectral_flatband(realize(model1(0.5), 64, 1, 0));
  const DecayProfile p = decay_profile(fb);
  CHECK_FALSE(p.fit_skipped);
  CHECK(p.rate > 0.1);
  CHECK(p.r_squared > 0.9);
  CHECK(p.decaying);
}

TEST_CASE("decay profile of the identity is a delta at distance zero") {
  FlatBand fb;
  fb.geom = LatticeGeometry{1, 32, 2};
  fb.chiral_unitary = Mat::Identity(32, 32);
  fb.flat_q = Mat::Zero(64, 64);
  const DecayProfile p = decay_profile(fb);
  CHECK(p.fit_skipped);
  CHECK(std::isinf(p.rate));
  CHECK(p.rate > 0);
}

TEST_CASE("ensemble decay profile in the localized regime") {
  std::vector<FlatBand> fbs;
  for (int r = 0; r < 6; ++r)
    fbs.push_back(spectral_flatband(realize(model2(0.5, 1.0, 0.0), 48, 33, r)));
  const DecayProfile p = decay_profile(fbs);
  CHECK(p.rate > 0.0);
  CHECK(p.r_squared > 0.9);
}

TEST_CASE("decay profile CSV has the documented columns") {
  const FlatBand fb = spectral_flatband(realize(model1(0.5), 32, 1, 0));
  const DecayProfile p = decay_profile(fb);
  std::ostringstream os;
  p.write_csv(os);
  const std::string csv = os.str();
  CHECK(csv.rfind("distance,mean_norm,std_norm,count\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(p.distance.size()) + 1);
}
