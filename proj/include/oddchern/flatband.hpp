#pragma once

#include "oddchern/models.hpp"

#include <iosfwd>
#include <span>
#include <stdexcept>

namespace oddchern {

// Raised when a sample has spectrum at the Fermi level within gap_tol; callers
// decide whether to resample or abort.
struct GaplessSample : std::runtime_error {
  double min_abs_eigenvalue;
  explicit GaplessSample(double e)
      : std::runtime_error("sample is gapless at the Fermi level"), min_abs_eigenvalue(e) {}
};

// Flat band data of one realization: Q = 1 - 2P = sign(H) and the chiral unitary U,
// the upper-right N L^d block of Q in the chiral frame.
struct FlatBand {
  LatticeGeometry geom;
  Mat flat_q;          // 2N L^d, Hermitian, Q^2 = 1
  Mat chiral_unitary;  // N L^d
  double gap = 0.0;    // min |eigenvalue of H|
  double unitarity_residual = 0.0;  // ||U* U - 1||_max
  double flatness_residual = 0.0;   // ||Q^2 - 1||_max

  double chirality_residual() const;  // ||S Q S + Q||_max
};

// Exact diagonalization route: Q = sum_i sign(E_i) |v_i><v_i|.
// Throws GaplessSample when min |E_i| <= gap_tol.
FlatBand spectral_flatband(const LatticeRealization& sample, double gap_tol = 1e-8);

// Resolvent route: Q = 1 - (1/i pi) contour integral of (z - H)^{-1} over a
// rectangular contour enclosing the negative spectrum, crossing the real axis at 0
// and below min spec(H), with Gauss-Legendre nodes on each edge. The returned
// flatness residual reports the achieved quadrature quality. The gap is estimated
// by inverse power iteration (no full diagonalization).
FlatBand contour_flatband(const LatticeRealization& sample, int nodes_per_edge,
                          double gap_tol = 1e-8);

// Distance histogram of ||<x|U|y>|| with a log-linear fit over [2, L/2 - 2].
struct DecayProfile {
  std::vector<double> distance;
  std::vector<double> mean_norm;
  std::vector<double> std_norm;
  std::vector<long> count;

  double rate = 0.0;       // decay exponent (positive = decaying)
  double intercept = 0.0;  // log-amplitude at distance 0
  double r_squared = 0.0;
  bool fit_skipped = false;  // e.g. profile is a delta at distance 0
  bool decaying = false;     // rate > 0 and fit valid

  void write_csv(std::ostream& os) const;  // columns: distance,mean_norm,std_norm,count
};

DecayProfile decay_profile(const FlatBand& fb);
// Disorder-averaged profile: block norms are averaged across the ensemble first.
DecayProfile decay_profile(std::span<const FlatBand> ensemble);

}  // namespace oddchern
