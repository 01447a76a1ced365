#include "oddchern/flatband.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace oddchern {

namespace {

// Extract the upper-right chiral block: rows in the "+" orbital sector, columns in
// the "-" sector, keeping the site-major ordering.
Mat extract_chiral_unitary(const LatticeGeometry& geom, const Mat& q) {
  const int tn = geom.orbitals;
  const int half = tn / 2;
  const long n_sites = geom.sites();
  Mat u(n_sites * half, n_sites * half);
  for (long sx = 0; sx < n_sites; ++sx)
    for (long sy = 0; sy < n_sites; ++sy)
      u.block(sx * half, sy * half, half, half) =
          q.block(sx * tn, sy * tn + half, half, half);
  return u;
}

void finish_flatband(FlatBand& fb) {
  const long n = fb.flat_q.rows();
  fb.flatness_residual = max_abs(fb.flat_q * fb.flat_q - Mat::Identity(n, n));
  const long nu = fb.chiral_unitary.rows();
  fb.unitarity_residual =
      max_abs(fb.chiral_unitary.adjoint() * fb.chiral_unitary - Mat::Identity(nu, nu));
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace

double FlatBand::chirality_residual() const {
  const int tn = geom.orbitals;
  const int half = tn / 2;
  const long n = flat_q.rows();
  Mat sqs = flat_q;
  for (long r = 0; r < n; ++r)
    for (long c = 0; c < n; ++c) {
      const bool rp = (r % tn) < half;
      const bool cp = (c % tn) < half;
      if (rp != cp) sqs(r, c) = -sqs(r, c);
    }
  return max_abs(sqs + flat_q);
}

FlatBand spectral_flatband(const LatticeRealization& sample, double gap_tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sample.hamiltonian);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_flatband: eigensolver failed");
  const RealVec& evals = es.eigenvalues();
  const double gap = evals.cwiseAbs().minCoeff();
  if (gap <= gap_tol) throw GaplessSample(gap);

  const long n = evals.size();
  RealVec signs(n);
  for (long i = 0; i < n; ++i) signs(i) = (evals(i) < 0.0) ? -1.0 : 1.0;

  FlatBand fb;
  fb.geom = sample.geom;
  fb.gap = gap;
  fb.flat_q = es.eigenvectors() * signs.asDiagonal() * es.eigenvectors().adjoint();
  fb.chiral_unitary = extract_chiral_unitary(sample.geom, fb.flat_q);
  finish_flatband(fb);
  return fb;
}

FlatBand contour_flatband(const LatticeRealization& sample, int nodes_per_edge,
                          double gap_tol) {
  const Mat& h = sample.hamiltonian;
  const long n = h.rows();

  // Spectral radius bound from Gershgorin rows.
  double radius = 0.0;
  for (long r = 0; r < n; ++r) radius = std::max(radius, h.row(r).cwiseAbs().sum());
  radius = std::max(radius, 1e-12);

  // Gap lower bound via power iteration on H^{-1} (H is invertible when gapped).
  Eigen::PartialPivLU<Mat> lu0(h);
  Vec v = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
  double inv_norm = 0.0;
  for (int it = 0; it < 30; ++it) {
    v = lu0.solve(v);
    inv_norm = v.norm();
    if (inv_norm == 0.0) break;
    v /= inv_norm;
  }
  const double gap_estimate = (inv_norm > 0.0) ? 1.0 / inv_norm : 0.0;
  if (gap_estimate <= gap_tol) throw GaplessSample(gap_estimate);

  // Rectangle [-X, 0] x [-Y, Y], counterclockwise. Crosses the real axis at the
  // Fermi level 0 and at -X below the spectrum.
  const double X = 1.1 * radius + 1.0;
  const double Y = std::max(1.0, 0.5 * radius);
  const cplx corners[4] = {{0.0, -Y}, {0.0, Y}, {-X, Y}, {-X, -Y}};

  std::vector<double> nodes, weights;
  gauss_legendre(nodes_per_edge, nodes, weights);

  Mat integral = Mat::Zero(n, n);
  for (int e = 0; e < 4; ++e) {
    const cplx a = corners[e];
    const cplx b = corners[(e + 1) % 4];
    const cplx mid = 0.5 * (a + b);
    const cplx halfspan = 0.5 * (b - a);
    for (int q = 0; q < nodes_per_edge; ++q) {
      const cplx z = mid + halfspan * nodes[q];
      Mat zh = -h;
      zh.diagonal().array() += z;
      Eigen::PartialPivLU<Mat> lu(zh);
      integral += (weights[q] * halfspan) * lu.solve(Mat::Identity(n, n));
    }
  }

  FlatBand fb;
  fb.geom = sample.geom;
  fb.gap = gap_estimate;
  fb.flat_q = Mat::Identity(n, n) - integral / (imag_unit * std::numbers::pi);
  // The quadrature leaves a small anti-Hermitian dust; fold it away before use.
  fb.flat_q = 0.5 * (fb.flat_q + fb.flat_q.adjoint()).eval();
  fb.chiral_unitary = extract_chiral_unitary(sample.geom, fb.flat_q);
  finish_flatband(fb);
  return fb;
}

namespace {

DecayProfile profile_from_binned(const LatticeGeometry& geom,
                                 const std::vector<double>& sum,
                                 const std::vector<double>& sum_sq,
                                 const std::vector<long>& count) {
  DecayProfile p;
  for (std::size_t b = 0; b < count.size(); ++b) {
    if (count[b] == 0) continue;
    const double mean = sum[b] / count[b];
    const double var = std::max(0.0, sum_sq[b] / count[b] - mean * mean);
    p.distance.push_back(static_cast<double>(b));
    p.mean_norm.push_back(mean);
    p.std_norm.push_back(std::sqrt(var));
    p.count.push_back(count[b]);
  }

  // Log-linear fit over the window [2, L/2 - 2].
  const double lo = 2.0, hi = geom.length / 2.0 - 2.0;
  std::vector<double> xs, ys;
  long window_bins = 0;
  for (std::size_t i = 0; i < p.distance.size(); ++i) {
    if (p.distance[i] < lo || p.distance[i] > hi) continue;
    ++window_bins;
    if (p.mean_norm[i] > 1e-30) {
      xs.push_back(p.distance[i]);
      ys.push_back(std::log(p.mean_norm[i]));
    }
  }

  if (xs.size() < 5) {
    // A populated window with no signal above the floor means the profile died
    // faster than we can resolve (delta profiles, strictly finite-range U).
    p.fit_skipped = true;
    if (window_bins >= 3) {
      p.rate = std::numeric_limits<double>::infinity();
      p.decaying = true;
    }
    return p;
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double nn = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double denom = nn * sxx - sx * sx;
  const double slope = (nn * sxy - sx * sy) / denom;
  p.rate = -slope;
  p.intercept = (sy - slope * sx) / nn;
  const double ss_tot = syy - sy * sy / nn;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fit = p.intercept + slope * xs[i];
    ss_res += (ys[i] - fit) * (ys[i] - fit);
  }
  p.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  p.decaying = p.rate > 0.0;
  return p;
}

}  // namespace

DecayProfile decay_profile(std::span<const FlatBand> ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("decay_profile: empty ensemble");
  const LatticeGeometry geom = ensemble.front().geom;
  const int half = geom.orbitals / 2;
  const long n_sites = geom.sites();
  const int d = geom.dimension;

  const int max_bin = static_cast<int>(std::ceil(geom.length * std::sqrt(double(d)))) + 1;
  std::vector<double> sum(max_bin + 1, 0.0), sum_sq(max_bin + 1, 0.0);
  std::vector<long> count(max_bin + 1, 0);

  std::vector<std::vector<int>> coords(n_sites);
  for (long s = 0; s < n_sites; ++s) coords[s] = geom.site_coords(s);

  for (long sx = 0; sx < n_sites; ++sx)
    for (long sy = 0; sy < n_sites; ++sy) {
      double dist2 = 0.0;
      for (int i = 0; i < d; ++i) {
        const double w = geom.wrap(coords[sx][i] - coords[sy][i]);
        dist2 += w * w;
      }
      const int bin = static_cast<int>(std::lround(std::sqrt(dist2)));
      // Disorder average of the block norms across the ensemble.
      double mean_norm = 0.0;
      for (const FlatBand& fb : ensemble)
        mean_norm += fb.chiral_unitary.block(sx * half, sy * half, half, half).norm();
      mean_norm /= static_cast<double>(ensemble.size());
      sum[bin] += mean_norm;
      sum_sq[bin] += mean_norm * mean_norm;
      ++count[bin];
    }

  return profile_from_binned(geom, sum, sum_sq, count);
}

DecayProfile decay_profile(const FlatBand& fb) {
  return decay_profile(std::span<const FlatBand>(&fb, 1));
}

void DecayProfile::write_csv(std::ostream& os) const {
  os << "distance,mean_norm,std_norm,count\n";
  char buf[128];
  for (std::size_t i = 0; i < distance.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%ld\n", distance[i], mean_norm[i],
                  std_norm[i], count[i]);
    os << buf;
  }
}

}  // namespace oddchern
