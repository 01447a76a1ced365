#include "oddchern/models.hpp"

#include "oddchern/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oddchern {

namespace {

bool is_zero_vector(const std::vector<int>& a) {
  for (int c : a)
    if (c != 0) return false;
  return true;
}

std::vector<int> negate(const std::vector<int>& a) {
  std::vector<int> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

bool lex_positive(const std::vector<int>& a) {
  for (int c : a) {
    if (c > 0) return true;
    if (c < 0) return false;
  }
  return false;
}

Mat standard_chiral_frame(int orbitals) {
  Mat s = Mat::Zero(orbitals, orbitals);
  const int n = orbitals / 2;
  for (int i = 0; i < n; ++i) s(i, i) = 1.0;
  for (int i = n; i < orbitals; ++i) s(i, i) = -1.0;
  return s;
}

}  // namespace

int HoppingModel::range() const {
  int r = 0;
  for (const auto& [a, t] : hoppings)
    for (int c : a) r = std::max(r, std::abs(c));
  return r;
}

void HoppingModel::set_hopping(const std::vector<int>& displacement, const Mat& t) {
  if (static_cast<int>(displacement.size()) != dimension)
    throw std::invalid_argument("set_hopping: displacement has wrong dimension");
  if (t.rows() != orbitals || t.cols() != orbitals)
    throw std::invalid_argument("set_hopping: matrix has wrong size");
  hoppings[displacement] = t;
  if (!is_zero_vector(displacement)) hoppings[negate(displacement)] = t.adjoint();
}

void HoppingModel::validate() const {
  if (dimension <= 0 || dimension % 2 == 0)
    throw std::invalid_argument("model: dimension must be odd and positive");
  if (orbitals <= 0 || orbitals % 2 != 0)
    throw std::invalid_argument("model: orbital count must be even and positive");
  if (chiral_frame.rows() != orbitals || chiral_frame.cols() != orbitals)
    throw std::invalid_argument("model: chiral frame has wrong size");
  if (max_abs(chiral_frame - standard_chiral_frame(orbitals)) > 1e-12)
    throw std::invalid_argument("model: chiral frame must be diag(1_N, -1_N)");
  if (magnetic_form.rows() != dimension || magnetic_form.cols() != dimension)
    throw std::invalid_argument("model: magnetic form has wrong size");
  if ((magnetic_form + magnetic_form.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("model: magnetic form must be antisymmetric");
  for (const auto& [a, t] : hoppings) {
    if (static_cast<int>(a.size()) != dimension)
      throw std::invalid_argument("model: displacement of wrong dimension");
    auto it = hoppings.find(negate(a));
    if (it == hoppings.end() || max_abs(it->second - t.adjoint()) > 1e-12)
      throw std::invalid_argument("model: t_{-a} != adjoint(t_a)");
    if (max_abs(chiral_frame * t * chiral_frame + t) > 1e-12)
      throw std::invalid_argument("model: hopping breaks chiral symmetry");
  }
  if (disorder.mass_coupling != 0.0 && disorder.mass_matrix.size() > 0) {
    if (disorder.mass_matrix.rows() != orbitals || disorder.mass_matrix.cols() != orbitals)
      throw std::invalid_argument("model: disorder mass matrix has wrong size");
    if (max_abs(chiral_frame * disorder.mass_matrix * chiral_frame + disorder.mass_matrix) > 1e-12)
      throw std::invalid_argument("model: disorder mass matrix breaks chiral symmetry");
    if (oddchern::hermiticity_residual(disorder.mass_matrix) > 1e-12)
      throw std::invalid_argument("model: disorder mass matrix must be Hermitian");
  }
}

Mat bloch_hamiltonian(const HoppingModel& model, const RealVec& k) {
  if (model.disorder.enabled())
    throw std::invalid_argument("bloch_hamiltonian: model has active disorder");
  if (model.magnetic_form.size() > 0 && model.magnetic_form.cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("bloch_hamiltonian: model has a magnetic form");
  if (k.size() != model.dimension)
    throw std::invalid_argument("bloch_hamiltonian: k of wrong dimension");
  Mat h = Mat::Zero(model.orbitals, model.orbitals);
  for (const auto& [a, t] : model.hoppings) {
    double phase = 0.0;
    for (int i = 0; i < model.dimension; ++i) phase += a[i] * k(i);
    h += t * std::exp(imag_unit * phase);
  }
  return h;
}

HoppingModel model1(double m) {
  HoppingModel mod;
  mod.dimension = 1;
  mod.orbitals = 2;
  mod.chiral_frame = pauli(3);
  mod.magnetic_form = RealMat::Zero(1, 1);
  mod.name = "model1";
  mod.m = m;
  // (H psi)(x) picks up (s1 + i s2)/2 from psi(x+1), so that hopping sits at
  // displacement a = -1 under t_{x-y}; this is what makes the winding +1 on the
  // topological side m in (-1, 1).
  mod.set_hopping({-1}, 0.5 * (pauli(1) + imag_unit * pauli(2)));
  mod.set_hopping({0}, m * pauli(2));
  mod.validate();
  return mod;
}

HoppingModel model2(double m, double lambda, double lambda_prime) {
  HoppingModel mod = model1(m);
  mod.name = "model2";
  mod.lambda = lambda;
  mod.lambda_prime = lambda_prime;
  mod.disorder.bond_coupling = lambda;
  mod.disorder.mass_coupling = lambda_prime;
  mod.disorder.mass_matrix = pauli(2);
  mod.validate();
  return mod;
}

HoppingModel model3d_reference(double m) {
  HoppingModel mod;
  mod.dimension = 3;
  mod.orbitals = 4;
  mod.chiral_frame = kron(pauli(3), Mat::Identity(2, 2));
  mod.magnetic_form = RealMat::Zero(3, 3);
  mod.name = "model3d";
  mod.m = m;

  const Mat g0 = kron(pauli(2), Mat::Identity(2, 2));
  std::vector<Mat> g = {kron(pauli(1), pauli(1)), kron(pauli(1), pauli(2)),
                        kron(pauli(1), pauli(3))};

  mod.set_hopping({0, 0, 0}, m * g0);
  for (int j = 0; j < 3; ++j) {
    std::vector<int> e(3, 0);
    e[j] = 1;
    // sin(k_j) g_j - cos(k_j) g0
    mod.set_hopping(e, -0.5 * imag_unit * g[j] - 0.5 * g0);
  }
  mod.validate();
  return mod;
}

HoppingModel builtin_model(const std::string& name, double m, double lambda,
                           double lambda_prime) {
  if (name == "model1") return model1(m);
  if (name == "model2") return model2(m, lambda, lambda_prime);
  if (name == "model3d") return model3d_reference(m);
  throw std::invalid_argument("unknown builtin model: " + name);
}

double LatticeRealization::chirality_residual() const {
  const long n = geom.hilbert_dim();
  Mat shs(n, n);
  const int tn = geom.orbitals;
  const int half = tn / 2;
  // S = 1 x diag(1_N, -1_N): flip the sign of the (+,-) and (-,+) orbital blocks.
  shs = hamiltonian;
  for (long r = 0; r < n; ++r)
    for (long c = 0; c < n; ++c) {
      const bool rp = (r % tn) < half;
      const bool cp = (c % tn) < half;
      if (rp != cp) shs(r, c) = -shs(r, c);
    }
  return max_abs(shs + hamiltonian);
}

namespace {

// Stable stream id for a canonical displacement.
std::uint64_t displacement_stream(const std::vector<int>& a, std::uint64_t tag) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ tag;
  for (int c : a) {
    h ^= static_cast<std::uint64_t>(static_cast<std::int64_t>(c)) + 0x100000000ull;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

LatticeRealization realize(const HoppingModel& model, int L, std::uint64_t master_seed,
                           std::uint64_t realization_index,
                           const std::vector<int>& disorder_shift) {
  model.validate();
  const int d = model.dimension;
  const int r = model.range();
  if (L <= 2 * r)
    throw std::invalid_argument("realize: L must exceed twice the hopping range");

  LatticeGeometry geom{d, L, model.orbitals};

  // Commensurability: every flux Theta_ij * L must be a multiple of 2 pi so the
  // Peierls phases and the magnetic translations close on the torus.
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double cycles = model.magnetic_form(i, j) * L / (2.0 * std::numbers::pi);
      if (std::abs(cycles - std::round(cycles)) > 1e-9)
        throw std::invalid_argument("realize: incommensurate magnetic flux (need 2 pi p/q, q | L)");
    }

  std::vector<int> shift(d, 0);
  if (!disorder_shift.empty()) {
    if (static_cast<int>(disorder_shift.size()) != d)
      throw std::invalid_argument("realize: disorder shift of wrong dimension");
    shift = disorder_shift;
  }

  const SplitRng rng = SplitRng::keyed(master_seed, realization_index);
  const long n_sites = geom.sites();
  const int tn = model.orbitals;

  LatticeRealization out;
  out.geom = geom;
  out.magnetic_form = model.magnetic_form;
  out.master_seed = master_seed;
  out.realization_index = realization_index;
  out.sample_key = rng.key;
  out.model_name = model.name;
  out.m = model.m;
  out.lambda = model.lambda;
  out.lambda_prime = model.lambda_prime;
  out.hamiltonian = Mat::Zero(geom.hilbert_dim(), geom.hilbert_dim());

  const bool magnetic = model.magnetic_form.cwiseAbs().maxCoeff() > 0.0;
  const double mass_coupling =
      (model.disorder.mass_matrix.size() > 0) ? model.disorder.mass_coupling : 0.0;

  for (long sx = 0; sx < n_sites; ++sx) {
    const std::vector<int> x = geom.site_coords(sx);
    for (const auto& [a, t] : model.hoppings) {
      // Row site x couples to y = x - a (so that x - y = a).
      std::vector<int> y(d);
      for (int i = 0; i < d; ++i) y[i] = x[i] - a[i];
      const long sy = geom.site_index(y);

      cplx phase(1.0, 0.0);
      if (magnetic) {
        // e^{i y ^ x} with representative coordinates in [0, L)^d.
        const std::vector<int> yc = geom.site_coords(sy);
        double w = 0.0;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) w += model.magnetic_form(i, j) * yc[i] * x[j];
        phase = std::exp(imag_unit * w);
      }

      Mat block = t;
      if (is_zero_vector(a)) {
        if (mass_coupling != 0.0) {
          std::vector<int> key(d);
          for (int i = 0; i < d; ++i) key[i] = ((x[i] - shift[i]) % L + L) % L;
          const double w = rng.symmetric(displacement_stream(a, 0x6d61u /*mass*/),
                                         static_cast<std::uint64_t>(geom.site_index(key)));
          block += mass_coupling * w * model.disorder.mass_matrix;
        }
      } else if (model.disorder.bond_coupling != 0.0) {
        // One random number per unordered bond: key it on the lexicographically
        // positive displacement and the site it points from.
        const bool pos = lex_positive(a);
        const std::vector<int>& canon_disp = pos ? a : negate(a);
        const std::vector<int>& base = pos ? y : x;
        std::vector<int> key(d);
        for (int i = 0; i < d; ++i) key[i] = ((base[i] - shift[i]) % L + L) % L;
        const double w = rng.symmetric(displacement_stream(canon_disp, 0x626fu /*bond*/),
                                       static_cast<std::uint64_t>(geom.site_index(key)));
        block *= (1.0 + model.disorder.bond_coupling * w);
      }

      out.hamiltonian.block(sx * tn, sy * tn, tn, tn) += phase * block;
    }
  }
  return out;
}

Mat magnetic_translation(const LatticeGeometry& geom, const RealMat& magnetic_form,
                         const std::vector<int>& a) {
  const int d = geom.dimension;
  const int tn = geom.orbitals;
  const long n_sites = geom.sites();
  Mat v = Mat::Zero(geom.hilbert_dim(), geom.hilbert_dim());
  for (long sx = 0; sx < n_sites; ++sx) {
    const std::vector<int> x = geom.site_coords(sx);
    std::vector<int> src(d);
    for (int i = 0; i < d; ++i) src[i] = x[i] - a[i];
    const long sy = geom.site_index(src);
    double w = 0.0;
    if (magnetic_form.size() > 0)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) w += magnetic_form(i, j) * a[i] * x[j];
    const cplx phase = std::exp(imag_unit * w);
    for (int o = 0; o < tn; ++o) v(sx * tn + o, sy * tn + o) = phase;
  }
  return v;
}

}  // namespace oddchern
