#pragma once

#include "oddchern/linalg.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace oddchern {

// Irreducible representation of the complex Clifford algebra with an odd number d
// of Hermitian generators sigma_1..sigma_d on C^{d'}, d' = 2^{(d-1)/2}, satisfying
//   sigma_i sigma_j + sigma_j sigma_i = 2 delta_{ij},
//   sigma_1 sigma_2 ... sigma_d = +(-i)^{(d-1)/2} * 1   (the "+" product convention).
struct CliffordRep {
  int dimension = 1;
  std::vector<Mat> generators;

  int rep_dim() const { return generators.empty() ? 1 : static_cast<int>(generators[0].rows()); }

  // Max entrywise violation of the anticommutation relations.
  double anticommutation_residual() const;
  double hermiticity_residual() const;
  // Max entrywise deviation of sigma_1...sigma_d from +(-i)^{(d-1)/2} * 1.
  double product_convention_residual() const;
};

// Oriented d-simplex with one vertex pinned at the origin (stored last).
struct Simplex {
  std::vector<RealVec> vertices;  // d+1 points in R^d, vertices.back() == 0

  static Simplex from_points(const std::vector<RealVec>& x);  // appends the origin
  int dimension() const { return static_cast<int>(vertices.size()) - 1; }
  // det[v_1 ... v_d] / d!  (signed).
  double oriented_volume() const;
  int orientation() const;
  // Degeneracy guard used to skip 0 ~ 0 Monte Carlo comparisons.
  bool near_degenerate(double rel_tol = 1e-6) const;
};

// Builds the representation by tensor doubling from d=1, then enforces the "+"
// product convention by swapping the first two generators when needed.
// Throws std::invalid_argument for even or non-positive d.
CliffordRep build_clifford(int d);

// Trace of sigma_{i_1} ... sigma_{i_q} for 1-based generator indices.
cplx clifford_trace_product(const CliffordRep& rep, std::span<const int> indices);

// tr(prod_i (y_i . sigma)) for d vectors in R^d. Equals
// (-2i)^{(d-1)/2} d! Vol[0, y_1, ..., y_d].
cplx trace_sigma_dot(const CliffordRep& rep, const std::vector<RealVec>& ys);

// Closed form of the geometric identity: (2^d (-i pi)^{(d-1)/2} / d!!) det[x_1 ... x_d].
cplx key_identity_rhs(const std::vector<RealVec>& xs);

struct McIntegrationParams {
  std::size_t samples = 2000000;
  double cutoff_factor = 50.0;  // radial cutoff = cutoff_factor * max_i |x_i|
  std::uint64_t seed = 1;
};

struct McEstimate {
  cplx value{0.0, 0.0};
  double std_error = 0.0;   // Monte Carlo standard error of the estimate
  double tail_bound = 0.0;  // estimated |integral| beyond the radial cutoff
  std::size_t samples = 0;
  bool converged = false;
};

// Monte Carlo evaluation of the integral side of the geometric identity,
//   int_{R^d} dx tr( prod_{i=1}^d (unit(x_i+x) - unit(x_{i+1}+x)) . sigma ),
// with x_{d+1} = 0. Importance sampling uses a heavy-tailed radial law matched to
// the |x|^{-(d+1)} falloff of the integrand, truncated at the radial cutoff; the
// O(1/R) remainder is estimated from the outermost samples and reported separately.
McEstimate key_identity_lhs(const CliffordRep& rep, const std::vector<RealVec>& xs,
                            const McIntegrationParams& params = {});

}  // namespace oddchern
