#include "oddchern/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace oddchern {

namespace {

// All permutations of {0, .., d-1} with signs.
std::vector<std::pair<std::vector<int>, int>> signed_permutations(int d) {
  std::vector<int> p(d);
  for (int i = 0; i < d; ++i) p[i] = i;
  std::vector<std::pair<std::vector<int>, int>> out;
  do {
    out.emplace_back(p, permutation_sign(p));
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

cplx realspace_prefactor(int d, ChernConvention convention) {
  const double pi = std::numbers::pi;
  const cplx base = (convention == ChernConvention::PlusIPi) ? cplx(0.0, pi) : cplx(0.0, -pi);
  return imag_unit * std::pow(base, (d - 1) / 2) / static_cast<double>(double_factorial(d));
}

InvariantEstimate finish_estimate(cplx raw, std::string method) {
  InvariantEstimate est;
  est.raw = raw;
  est.value = raw.real();
  est.nearest_int = std::lround(est.value);
  est.residual = std::abs(est.value - static_cast<double>(est.nearest_int));
  est.imag_leak = std::abs(raw.imag());
  est.method = std::move(method);
  return est;
}

// Flat band unitary of a Bloch matrix: upper-right N x N block of sign(H(k)).
// Returns the gap through min_abs.
Mat bloch_unitary(const Mat& hk, double& min_abs) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hk);
  const RealVec& ev = es.eigenvalues();
  min_abs = ev.cwiseAbs().minCoeff();
  const long n = ev.size();
  RealVec signs(n);
  for (long i = 0; i < n; ++i) signs(i) = (ev(i) < 0.0) ? -1.0 : 1.0;
  const Mat q = es.eigenvectors() * signs.asDiagonal() * es.eigenvectors().adjoint();
  const long half = n / 2;
  return q.block(0, half, half, half);
}

}  // namespace

// ---------------------------------------------------------------------------
// Dirac phase
// ---------------------------------------------------------------------------

DiracPhase dirac_phase(const LatticeGeometry& geom, const RealVec& x0, const CliffordRep& rep,
                       std::vector<int> center) {
  const int d = geom.dimension;
  if (rep.dimension != d) throw std::invalid_argument("dirac_phase: Clifford rank != dimension");
  if (x0.size() != d) throw std::invalid_argument("dirac_phase: offset of wrong dimension");
  for (int i = 0; i < d; ++i)
    if (x0(i) < 0.0 || x0(i) > 1.0)
      throw std::invalid_argument("dirac_phase: offset must lie in [0,1]^d");
  if (center.empty()) center.assign(d, geom.length / 2);

  DiracPhase f;
  f.geom = geom;
  f.offset = x0;
  f.center = center;
  f.clifford_dim = rep.rep_dim();

  const long n_sites = geom.sites();
  const int dp = f.clifford_dim;
  f.site_blocks.resize(n_sites);
  for (long s = 0; s < n_sites; ++s) {
    const std::vector<int> c = geom.site_coords(s);
    RealVec v(d);
    for (int i = 0; i < d; ++i) v(i) = geom.wrap(c[i] - center[i]) + x0(i);
    const double norm = v.norm();
    if (norm < 1e-12) {
      // Zero mode of D at this site (integer offset); replaced by the identity.
      f.site_blocks[s] = Mat::Identity(dp, dp);
      f.regularized = true;
    } else {
      Mat block = Mat::Zero(dp, dp);
      for (int i = 0; i < d; ++i) block += (v(i) / norm) * rep.generators[i];
      f.site_blocks[s] = block;
    }
  }
  return f;
}

double DiracPhase::involution_residual() const {
  const int dp = clifford_dim;
  const Mat id = Mat::Identity(dp, dp);
  double worst = 0.0;
  for (const Mat& b : site_blocks) {
    worst = std::max(worst, max_abs(b - b.adjoint()));
    worst = std::max(worst, max_abs(b * b - id));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// k-space estimator
// ---------------------------------------------------------------------------

InvariantEstimate kspace_odd_chern(const HoppingModel& model, int grid) {
  if (model.dimension == 1) {
    // Exact winding of det U_0(k): the summed principal-branch increments close to
    // an integer multiple of 2 pi on a loop.
    double total = 0.0;
    double gap = std::numeric_limits<double>::infinity();
    cplx prev_det;
    cplx first_det;
    for (int j = 0; j < grid; ++j) {
      RealVec k(1);
      k(0) = 2.0 * std::numbers::pi * j / grid;
      double min_abs = 0.0;
      const Mat u = bloch_unitary(bloch_hamiltonian(model, k), min_abs);
      gap = std::min(gap, min_abs);
      if (min_abs <= 1e-8) throw GaplessSample(min_abs);
      const cplx det = u.determinant();
      if (j == 0)
        first_det = det;
      else
        total += std::arg(det / prev_det);
      prev_det = det;
    }
    total += std::arg(first_det / prev_det);
    InvariantEstimate est = finish_estimate(-total / (2.0 * std::numbers::pi), "kspace");
    est.grid = grid;
    est.gap = gap;
    return est;
  }
  return kspace_odd_chern_fd(model, grid);
}

InvariantEstimate kspace_odd_chern_fd(const HoppingModel& model, int grid) {
  const int d = model.dimension;
  const int half = model.half_orbitals();
  if (grid < 5) throw std::invalid_argument("kspace_odd_chern: grid too small");

  long n_k = 1;
  for (int i = 0; i < d; ++i) n_k *= grid;

  // Tabulate U_0 on the grid.
  std::vector<Mat> u(n_k);
  double gap = std::numeric_limits<double>::infinity();
  std::vector<int> idx(d, 0);
  for (long flat = 0; flat < n_k; ++flat) {
    long rest = flat;
    RealVec k(d);
    for (int i = 0; i < d; ++i) {
      idx[i] = static_cast<int>(rest % grid);
      rest /= grid;
      k(i) = 2.0 * std::numbers::pi * idx[i] / grid;
    }
    double min_abs = 0.0;
    u[flat] = bloch_unitary(bloch_hamiltonian(model, k), min_abs);
    gap = std::min(gap, min_abs);
    if (min_abs <= 1e-8) throw GaplessSample(min_abs);
  }

  const auto neighbor = [&](long flat, int axis, int step) -> long {
    long stride = 1;
    for (int i = 0; i < axis; ++i) stride *= grid;
    const long axis_val = (flat / stride) % grid;
    const long shifted = ((axis_val + step) % grid + grid) % grid;
    return flat + (shifted - axis_val) * stride;
  };

  const double h = 2.0 * std::numbers::pi / grid;
  const auto perms = signed_permutations(d);

  cplx acc(0.0, 0.0);
  std::vector<Mat> a(d, Mat(half, half));
  for (long flat = 0; flat < n_k; ++flat) {
    const Mat u_inv = u[flat].adjoint();  // U is unitary on the gapped grid
    for (int axis = 0; axis < d; ++axis) {
      // Fourth-order centered derivative along the periodic axis.
      const Mat du = (8.0 * (u[neighbor(flat, axis, 1)] - u[neighbor(flat, axis, -1)]) -
                      (u[neighbor(flat, axis, 2)] - u[neighbor(flat, axis, -2)])) /
                     (12.0 * h);
      a[axis] = u_inv * du;
    }
    for (const auto& [perm, sign] : perms) {
      Mat prod = a[perm[0]];
      for (int i = 1; i < d; ++i) prod = prod * a[perm[i]];
      acc += static_cast<double>(sign) * prod.trace();
    }
  }

  const double cell = std::pow(2.0 * std::numbers::pi / grid, d);
  const cplx pref = static_cast<double>(factorial((d - 1) / 2)) /
                    static_cast<double>(factorial(d)) *
                    std::pow(imag_unit / (2.0 * std::numbers::pi), (d + 1) / 2);
  InvariantEstimate est = finish_estimate(pref * cell * acc, "kspace");
  est.grid = grid;
  est.gap = gap;
  return est;
}

// ---------------------------------------------------------------------------
// Real-space estimator
// ---------------------------------------------------------------------------

namespace {

// Sites whose centered coordinates lie in the central cube holding ~fraction of
// all sites.
std::vector<long> central_region(const LatticeGeometry& geom, double fraction) {
  const int d = geom.dimension;
  const int side = std::clamp(
      static_cast<int>(std::lround(std::pow(fraction, 1.0 / d) * geom.length)), 1, geom.length);
  const int lo = -(side / 2);
  const int hi = lo + side - 1;
  const int center = geom.length / 2;
  std::vector<long> region;
  const long n_sites = geom.sites();
  for (long s = 0; s < n_sites; ++s) {
    const std::vector<int> c = geom.site_coords(s);
    bool inside = true;
    for (int i = 0; i < d; ++i) {
      const int w = geom.wrap(c[i] - center);
      if (w < lo || w > hi) inside = false;
    }
    if (inside) region.push_back(s);
  }
  return region;
}

}  // namespace

InvariantEstimate realspace_odd_chern(const FlatBand& fb, double trace_region,
                                      ChernConvention convention) {
  const LatticeGeometry& geom = fb.geom;
  const int d = geom.dimension;
  const int half = geom.orbitals / 2;
  const long n_sites = geom.sites();
  const Mat& u = fb.chiral_unitary;

  std::vector<std::vector<int>> coords(n_sites);
  for (long s = 0; s < n_sites; ++s) coords[s] = geom.site_coords(s);

  // A_j = U^dagger (i [X_j, U]); the commutator multiplies each site block by the
  // minimal-image displacement along axis j.
  std::vector<Mat> a(d);
  for (int axis = 0; axis < d; ++axis) {
    Mat xu(u.rows(), u.cols());
    for (long sx = 0; sx < n_sites; ++sx)
      for (long sy = 0; sy < n_sites; ++sy) {
        const double w = geom.wrap(coords[sx][axis] - coords[sy][axis]);
        xu.block(sx * half, sy * half, half, half) =
            (imag_unit * w) * u.block(sx * half, sy * half, half, half);
      }
    a[axis] = u.adjoint() * xu;
  }

  const std::vector<long> region = central_region(geom, trace_region);
  const auto perms = signed_permutations(d);

  cplx acc(0.0, 0.0);
  for (const auto& [perm, sign] : perms) {
    Mat prod = a[perm[0]];
    for (int i = 1; i < d; ++i) prod = prod * a[perm[i]];
    cplx tr(0.0, 0.0);
    for (long s : region)
      for (int o = 0; o < half; ++o) tr += prod(s * half + o, s * half + o);
    acc += static_cast<double>(sign) * tr / static_cast<double>(region.size());
  }

  InvariantEstimate est =
      finish_estimate(realspace_prefactor(d, convention) * acc, "realspace");
  est.gap = fb.gap;
  return est;
}

// ---------------------------------------------------------------------------
// Calderon-Fedosov index
// ---------------------------------------------------------------------------

namespace {

// Window of sites within Chebyshev torus distance radius of the center.
std::vector<long> truncation_window(const LatticeGeometry& geom, const std::vector<int>& center,
                                    int radius) {
  std::vector<long> window;
  const long n_sites = geom.sites();
  for (long s = 0; s < n_sites; ++s) {
    const std::vector<int> c = geom.site_coords(s);
    bool inside = true;
    for (int i = 0; i < geom.dimension; ++i)
      if (std::abs(geom.wrap(c[i] - center[i])) > radius) inside = false;
    if (inside) window.push_back(s);
  }
  return window;
}

// Compression of U (tensored with the Clifford identity) and F to the window.
// Basis index: (window position, orbital, clifford component). Entries whose
// centered coordinates are separated by more than L/2 along some axis are dropped:
// for those pairs the torus entry describes the wrapped path, which has no
// counterpart in the infinite-volume operator being approximated.
void truncated_operators(const FlatBand& fb, const DiracPhase& phase,
                         const std::vector<long>& window, Mat& u_t, Mat& u_inv_t, Mat& f_t) {
  const int half = fb.geom.orbitals / 2;
  const int d = fb.geom.dimension;
  const int dp = phase.clifford_dim;
  const long nw = static_cast<long>(window.size());
  const long dim = nw * half * dp;
  const Mat u_dag = fb.chiral_unitary.adjoint();

  u_t = Mat::Zero(dim, dim);
  u_inv_t = Mat::Zero(dim, dim);
  f_t = Mat::Zero(dim, dim);

  std::vector<std::vector<int>> centered(nw);
  for (long wi = 0; wi < nw; ++wi) {
    const std::vector<int> c = fb.geom.site_coords(window[wi]);
    centered[wi].resize(d);
    for (int i = 0; i < d; ++i) centered[wi][i] = fb.geom.wrap(c[i] - phase.center[i]);
  }

  for (long wi = 0; wi < nw; ++wi) {
    const long si = window[wi];
    for (long wj = 0; wj < nw; ++wj) {
      const long sj = window[wj];
      bool direct = true;
      for (int i = 0; i < d; ++i)
        if (std::abs(centered[wi][i] - centered[wj][i]) > fb.geom.length / 2) direct = false;
      if (!direct) continue;
      for (int oi = 0; oi < half; ++oi)
        for (int oj = 0; oj < half; ++oj) {
          const cplx uval = fb.chiral_unitary(si * half + oi, sj * half + oj);
          const cplx vval = u_dag(si * half + oi, sj * half + oj);
          for (int c = 0; c < dp; ++c) {
            u_t((wi * half + oi) * dp + c, (wj * half + oj) * dp + c) = uval;
            u_inv_t((wi * half + oi) * dp + c, (wj * half + oj) * dp + c) = vval;
          }
        }
    }
    const Mat& fblock = phase.site_blocks[si];
    for (int o = 0; o < half; ++o)
      for (int ci = 0; ci < dp; ++ci)
        for (int cj = 0; cj < dp; ++cj)
          f_t((wi * half + o) * dp + ci, (wi * half + o) * dp + cj) = fblock(ci, cj);
  }
}

cplx fedosov_value(const FlatBand& fb, const DiracPhase& phase, int radius) {
  const int d = fb.geom.dimension;
  const std::vector<long> window = truncation_window(fb.geom, phase.center, radius);
  Mat u_t, u_inv_t, f_t;
  truncated_operators(fb, phase, window, u_t, u_inv_t, f_t);

  const long dim = u_t.rows();
  const Mat comm = f_t * u_t - u_t * f_t;  // [F, U - 1] = [F, U]
  Mat eta = u_inv_t - Mat::Identity(dim, dim);
  for (int i = 0; i < d; ++i) eta = eta * comm;

  // Graded trace Tr'(eta) = Tr(F (F eta + eta F)) / 2 for odd-degree eta.
  const Mat d_eta = f_t * eta + eta * f_t;
  const cplx tr_prime = 0.5 * (f_t * d_eta).trace();
  const cplx lambda_d = std::pow(2.0, -d) * i_pow(d + 1);
  return lambda_d * tr_prime;
}

}  // namespace

InvariantEstimate fedosov_index(const FlatBand& fb, const DiracPhase& phase, int trunc_radius) {
  if (2 * trunc_radius >= fb.geom.length)
    throw std::invalid_argument("fedosov_index: truncation radius must be below L/2");
  if (trunc_radius < 2) throw std::invalid_argument("fedosov_index: truncation radius too small");

  const int r_half = std::max(2, trunc_radius / 2);
  const int r_three_quarter = std::max(r_half + 1, 3 * trunc_radius / 4);
  const cplx v_half = fedosov_value(fb, phase, r_half);
  const cplx v_three_quarter = fedosov_value(fb, phase, r_three_quarter);
  const cplx v_full = fedosov_value(fb, phase, trunc_radius);

  InvariantEstimate est = finish_estimate(v_full, "fedosov");
  est.trunc_radius = trunc_radius;
  est.gap = fb.gap;
  est.trunc_record = {{r_half, v_half.real()},
                      {r_three_quarter, v_three_quarter.real()},
                      {trunc_radius, v_full.real()}};
  est.trunc_converged = std::abs(v_full.real() - v_three_quarter.real()) < 0.05;
  return est;
}

SummabilityTable summability_diagnostic(const FlatBand& fb, const DiracPhase& phase, int r_max) {
  if (2 * r_max >= fb.geom.length)
    throw std::invalid_argument("summability_diagnostic: radius must be below L/2");
  const int d = fb.geom.dimension;

  SummabilityTable tab;
  const int step = std::max(1, r_max / 8);
  for (int r = step; r <= r_max; r += step) tab.radii.push_back(r);
  if (tab.radii.empty() || tab.radii.back() != r_max) tab.radii.push_back(r_max);

  for (int r : tab.radii) {
    const std::vector<long> window = truncation_window(fb.geom, phase.center, r);
    Mat u_t, u_inv_t, f_t;
    truncated_operators(fb, phase, window, u_t, u_inv_t, f_t);
    const Mat comm = f_t * u_t - u_t * f_t;
    Eigen::JacobiSVD<Mat> svd(comm);
    const RealVec& s = svd.singularValues();
    double low = 0.0, high = 0.0;
    for (long i = 0; i < s.size(); ++i) {
      low += std::pow(s(i), d);
      high += std::pow(s(i), d + 1);
    }
    tab.sum_p_low.push_back(low);
    tab.sum_p_high.push_back(high);
  }
  return tab;
}

InvariantStats summarize_estimates(const std::vector<InvariantEstimate>& estimates) {
  InvariantStats st;
  st.n = static_cast<long>(estimates.size());
  if (estimates.empty()) return st;
  double sum = 0.0, sum_sq = 0.0;
  std::map<long, long> votes;
  for (const InvariantEstimate& e : estimates) {
    sum += e.value;
    sum_sq += e.value * e.value;
    ++votes[e.nearest_int];
    st.max_residual = std::max(st.max_residual, e.residual);
    st.max_imag_leak = std::max(st.max_imag_leak, e.imag_leak);
  }
  st.mean = sum / st.n;
  st.stddev = std::sqrt(std::max(0.0, sum_sq / st.n - st.mean * st.mean));
  long best = 0;
  for (const auto& [value, count] : votes)
    if (count > best) {
      best = count;
      st.mode_int = value;
    }
  st.mode_fraction = static_cast<double>(best) / static_cast<double>(st.n);
  return st;
}

}  // namespace oddchern
