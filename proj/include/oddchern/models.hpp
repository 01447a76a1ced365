#pragma once

#include "oddchern/linalg.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oddchern {

// Random laws dressing a translation invariant model. Bond disorder multiplies
// every off-site hopping by (1 + bond_coupling * w_b), mass disorder adds
// mass_coupling * w'_x * mass_matrix on site; w, w' i.i.d. uniform on [-1/2, 1/2].
// Real symmetric bond factors keep H Hermitian; an S-odd mass matrix keeps it chiral.
struct DisorderSpec {
  double bond_coupling = 0.0;
  double mass_coupling = 0.0;
  Mat mass_matrix;  // 2N x 2N; empty means no mass disorder even if coupling != 0

  bool enabled() const { return bond_coupling != 0.0 || (mass_coupling != 0.0 && mass_matrix.size() > 0); }
};

// Translation covariant hopping model on Z^d with 2N orbitals per site:
//   (H psi)(x) = sum_y e^{i y ^ x} t_{x,y} psi(y),  t_{x,y} = dressed t_{x-y},
// with t_{-a} = t_a^dagger and chiral symmetry S t_a S = -t_a in the frame
// S = diag(1_N, -1_N). The antisymmetric bilinear form y ^ x = y . Theta x carries
// the magnetic Peierls phases.
struct HoppingModel {
  int dimension = 1;  // odd
  int orbitals = 2;   // 2N
  std::map<std::vector<int>, Mat> hoppings;
  Mat chiral_frame;       // diag(1_N, -1_N) after normalization
  RealMat magnetic_form;  // d x d antisymmetric (Theta)
  DisorderSpec disorder;

  // Metadata carried through to result records.
  std::string name = "custom";
  double m = 0.0;
  double lambda = 0.0;
  double lambda_prime = 0.0;

  int half_orbitals() const { return orbitals / 2; }
  int range() const;
  void set_hopping(const std::vector<int>& displacement, const Mat& t);  // also stores the adjoint at -a
  // Checks every structural invariant; throws std::invalid_argument on violation.
  void validate() const;
};

// Fourier transform H(k) = sum_a t_a e^{i a.k} of the clean part.
// Rejects models with active disorder or magnetic form.
Mat bloch_hamiltonian(const HoppingModel& model, const RealVec& k);

// Two-band chain: t_{-1} = (s1 + i s2)/2, t_{+1} = (s1 - i s2)/2, t_0 = m s2,
// chiral frame s3. Bloch matrix cos(k) s1 + (m + sin(k)) s2; gap closes at m = +-1.
HoppingModel model1(double m);

// model1 with uniform bond disorder (1 + lambda w_x) and mass disorder
// (m + lambda' w'_x) s2.
HoppingModel model2(double m, double lambda, double lambda_prime);

// Four-band chiral model on Z^3: H(k) = sum_j sin(k_j) G_j + (m - sum_j cos(k_j)) G_0
// with G_j = tau1 x s_j, G_0 = tau2 x 1, chiral frame tau3 x 1. Phase boundaries at
// m in {-3,-1,1,3}; the winding inside each window is fixed numerically by the
// k-space estimator.
HoppingModel model3d_reference(double m);

// Builtin lookup by name ("model1" | "model2" | "model3d").
HoppingModel builtin_model(const std::string& name, double m, double lambda, double lambda_prime);

// Finite torus indexing: site linear index runs first over axis 0, then 1, ...
// Matrix row = site * orbitals + orbital.
struct LatticeGeometry {
  int dimension = 1;
  int length = 1;    // L per axis
  int orbitals = 2;  // 2N

  long sites() const {
    long n = 1;
    for (int i = 0; i < dimension; ++i) n *= length;
    return n;
  }
  long hilbert_dim() const { return sites() * orbitals; }

  std::vector<int> site_coords(long site) const {
    std::vector<int> c(dimension);
    for (int i = 0; i < dimension; ++i) {
      c[i] = static_cast<int>(site % length);
      site /= length;
    }
    return c;
  }
  long site_index(const std::vector<int>& coords) const {
    long idx = 0;
    for (int i = dimension - 1; i >= 0; --i) {
      int c = ((coords[i] % length) + length) % length;
      idx = idx * length + c;
    }
    return idx;
  }
  // Minimal image of a coordinate difference, in [-L/2, L/2).
  int wrap(int delta) const {
    int w = ((delta % length) + length) % length;
    if (w >= (length + 1) / 2) w -= length;
    return w;
  }
};

// One disordered sample on the torus.
struct LatticeRealization {
  LatticeGeometry geom;
  Mat hamiltonian;
  RealMat magnetic_form;
  std::uint64_t master_seed = 0;
  std::uint64_t realization_index = 0;
  std::uint64_t sample_key = 0;  // derived sub-seed identifying this sample

  std::string model_name = "custom";
  double m = 0.0;
  double lambda = 0.0;
  double lambda_prime = 0.0;

  double hermiticity_residual() const { return oddchern::hermiticity_residual(hamiltonian); }
  double chirality_residual() const;
};

// Assembles the dense torus Hamiltonian with minimal-image wrapping and Peierls
// phases. Preconditions: L > 2 * range; every flux Theta_ij * L must be an integer
// multiple of 2 pi (commensurability), otherwise throws.
// disorder_shift translates the disorder configuration by the given lattice vector
// (used for covariance checks): shifted t_{x,y} uses the random numbers of
// t_{x-a, y-a}.
LatticeRealization realize(const HoppingModel& model, int L, std::uint64_t master_seed,
                           std::uint64_t realization_index = 0,
                           const std::vector<int>& disorder_shift = {});

// Dense magnetic translation V_a psi(x) = e^{i a ^ x} psi(x - a) on the torus,
// acting on the same space as a LatticeRealization.
Mat magnetic_translation(const LatticeGeometry& geom, const RealMat& magnetic_form,
                         const std::vector<int>& a);

}  // namespace oddchern
