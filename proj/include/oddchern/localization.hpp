#pragma once

#include "oddchern/ensemble.hpp"
#include "oddchern/flatband.hpp"
#include "oddchern/invariants.hpp"
#include "oddchern/models.hpp"

#include <functional>
#include <iosfwd>
#include <span>

namespace oddchern {

// Resolvent (H - E - i eta)^{-1} by dense solve; eta > 0 keeps it regular.
Mat green_function(const LatticeRealization& sample, double energy, double eta);

// Distance-binned fractional moments of the Green function with a log-linear fit:
//   mean ||G(x,y)||^s ~ C_s e^{-beta_s |x-y|} over the window [2, L/2-2].
struct FracMomentReport {
  double s = 0.5;
  double energy = 0.0;
  double eta = 1e-3;
  std::vector<double> distance;
  std::vector<double> mean_pow;  // ensemble/position average of ||G(x,y)||^s
  std::vector<long> count;

  double rate = 0.0;          // beta_s
  double log_constant = 0.0;  // log C_s
  double r_squared = 0.0;
  bool decay_detected = false;  // rate > 0 and fit valid

  void write_csv(std::ostream& os) const;  // columns: distance,mean_pow,count
};

FracMomentReport fractional_moment_fit(std::span<const LatticeRealization> ensemble,
                                       double energy, double s, double eta);

// One row of a transition scan: invariant statistics, flat band decay rate and
// fractional-moment rate at a parameter point.
struct TransitionScanPoint {
  double parameter = 0.0;
  InvariantStats invariant;
  double decay_rate = 0.0;   // lambda_fit from the ensemble decay profile
  double frac_rate = 0.0;    // beta_s
  double mean_gap = 0.0;
  long rejected = 0;         // gapless samples skipped
};

struct ScanSpec {
  int L = 64;
  int ensemble = 20;
  std::uint64_t seed = 1;
  double trace_region = 0.5;
  double gap_tol = 1e-8;
  double s = 0.5;
  double eta = 1e-3;
  ChernConvention convention = kDefaultConvention;
};

// Correlates invariant plateau breakdown with decay-rate collapse along a model
// family parameterized by one real number. Reports whatever is measured; points
// where every sample is gapless carry empty invariant stats.
std::vector<TransitionScanPoint> transition_scan(
    const std::function<HoppingModel(double)>& family, std::span<const double> grid,
    const ScanSpec& spec);

}  // namespace oddchern
