#pragma once

#include "oddchern/clifford.hpp"
#include "oddchern/flatband.hpp"
#include "oddchern/models.hpp"

#include <string>
#include <vector>

namespace oddchern {

// Phase F = D/|D| of the shifted position Dirac operator D = sum_j (X_j + x0_j) sigma_j,
// stored as one Hermitian unitary d' x d' block per lattice site. Site coordinates are
// centered at a chosen trace center and wrapped to [-L/2, L/2)^d. Integer offsets hit
// a zero mode at one site, where the block is regularized to the identity.
struct DiracPhase {
  LatticeGeometry geom;
  RealVec offset;            // x0 in [0,1]^d
  std::vector<int> center;   // lattice site the coordinates are centered on
  bool regularized = false;  // a zero-mode site was set to the identity block
  int clifford_dim = 1;      // d'
  std::vector<Mat> site_blocks;

  // Max per-site violation of F = F*, F^2 = 1.
  double involution_residual() const;
};

DiracPhase dirac_phase(const LatticeGeometry& geom, const RealVec& x0, const CliffordRep& rep,
                       std::vector<int> center = {});

// Sign convention of the real-space prefactor: the two candidate phases
// i (+/- i pi)^{(d-1)/2} / d!! differ by (-1)^{(d-1)/2}. PlusIPi follows the
// crossed-product Chern number normalization and is the one that agrees with the
// k-space estimator in every dimension we test; MinusIPi is the local-formula
// normalization, kept selectable for comparison. Both coincide for d = 1.
enum class ChernConvention { PlusIPi, MinusIPi };
inline constexpr ChernConvention kDefaultConvention = ChernConvention::PlusIPi;

struct InvariantEstimate {
  cplx raw{0.0, 0.0};
  double value = 0.0;     // Re(raw)
  long nearest_int = 0;   // lround(value)
  double residual = 0.0;  // |value - nearest_int|
  double imag_leak = 0.0; // |Im(raw)|
  std::string method;     // "kspace" | "realspace" | "fedosov"

  long grid = 0;          // k-points per axis (kspace)
  int trunc_radius = 0;   // truncation radius (fedosov)
  double gap = 0.0;

  // Values at smaller truncations, for convergence reporting (fedosov).
  std::vector<std::pair<int, double>> trunc_record;
  bool trunc_converged = true;

  bool accepted(double residual_tol = 0.1, double imag_tol = 0.05) const {
    return residual < residual_tol && imag_leak < imag_tol;
  }
};

// Momentum-space odd Chern number of a clean gapped model. d = 1 uses the exact
// winding of det U_0(k) (integer to rounding); d >= 3 discretizes the antisymmetrized
// trace integral with fourth-order centered derivatives of the flat band unitary.
// Throws GaplessSample when the Bloch gap closes on the grid.
InvariantEstimate kspace_odd_chern(const HoppingModel& model, int grid);

// Generic finite-difference route, also valid at d = 1 (cross-check of the winding path).
InvariantEstimate kspace_odd_chern_fd(const HoppingModel& model, int grid);

// Real-space (non-commutative) odd Chern number of one flat band sample:
//   pref(d) sum_rho sign(rho) T( prod_j U^{-1} i[X_{rho_j}, U] ),
// with T the trace per volume over the central trace_region fraction of sites and
// [X_j, U] realized through minimal-image displacements on the torus. The wrapped
// commutator is faithful only when the decay length of U is well below L/2
// (check decay_profile); near a transition the residual itself is the signal.
InvariantEstimate realspace_odd_chern(const FlatBand& fb, double trace_region = 0.5,
                                      ChernConvention convention = kDefaultConvention);

// Fredholm index of the compression E U E by the Calderon-Fedosov trace
//   lambda_d Tr'( (U^{-1} - 1) [F, U - 1] ... [F, U - 1] ),   lambda_d = 2^{-d} i^{d+1},
// evaluated with all operators truncated to the cube of radius R_trunc around the
// trace center and U tensored with the Clifford identity. Tr' is the graded trace
// eta -> Tr(F (F eta + eta F)) / 2. The estimate carries values at R/2, 3R/4, R.
InvariantEstimate fedosov_index(const FlatBand& fb, const DiracPhase& phase, int trunc_radius);

// Partial Schatten sums of the truncated commutator [F, U] at a ladder of radii:
// sum_i s_i^p for p = d (low) and p = d + 1 (high). The high sum plateaus in R for
// localized samples while the low sum keeps growing.
struct SummabilityTable {
  std::vector<int> radii;
  std::vector<double> sum_p_low;   // p = d
  std::vector<double> sum_p_high;  // p = d + 1
};

SummabilityTable summability_diagnostic(const FlatBand& fb, const DiracPhase& phase, int r_max);

// Ensemble statistics over accepted estimates.
struct InvariantStats {
  long n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  long mode_int = 0;
  double mode_fraction = 0.0;  // fraction of samples rounding to mode_int
  double max_residual = 0.0;
  double max_imag_leak = 0.0;
};

InvariantStats summarize_estimates(const std::vector<InvariantEstimate>& estimates);

}  // namespace oddchern
