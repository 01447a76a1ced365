#include "oddchern/clifford.hpp"

#include "oddchern/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oddchern {

double CliffordRep::anticommutation_residual() const {
  const int dp = rep_dim();
  const Mat id = Mat::Identity(dp, dp);
  double worst = 0.0;
  for (int i = 0; i < dimension; ++i)
    for (int j = i; j < dimension; ++j) {
      const Mat anti = generators[i] * generators[j] + generators[j] * generators[i];
      const Mat target = (i == j) ? Mat(2.0 * id) : Mat(Mat::Zero(dp, dp));
      worst = std::max(worst, max_abs(anti - target));
    }
  return worst;
}

double CliffordRep::hermiticity_residual() const {
  double worst = 0.0;
  for (const Mat& g : generators) worst = std::max(worst, oddchern::hermiticity_residual(g));
  return worst;
}

double CliffordRep::product_convention_residual() const {
  const int dp = rep_dim();
  Mat prod = Mat::Identity(dp, dp);
  for (const Mat& g : generators) prod = prod * g;
  const cplx expected = minus_i_pow((dimension - 1) / 2);
  return max_abs(prod - expected * Mat::Identity(dp, dp));
}

CliffordRep build_clifford(int d) {
  if (d <= 0 || d % 2 == 0)
    throw std::invalid_argument("build_clifford: dimension must be odd and positive");

  CliffordRep rep;
  rep.dimension = 1;
  rep.generators = {Mat::Ones(1, 1)};

  // Doubling step: given generators for d, the set {g_j x tau_1, 1 x tau_2, 1 x tau_3}
  // represents d+2 on twice the space.
  while (rep.dimension < d) {
    const int dp = rep.rep_dim();
    std::vector<Mat> next;
    next.reserve(rep.dimension + 2);
    for (const Mat& g : rep.generators) next.push_back(kron(g, pauli(1)));
    next.push_back(kron(Mat::Identity(dp, dp), pauli(2)));
    next.push_back(kron(Mat::Identity(dp, dp), pauli(3)));
    rep.generators = std::move(next);
    rep.dimension += 2;
  }

  // The doubling flips the sign of the full product at every step; restore the
  // "+" convention with one transposition, which is an odd permutation.
  if (rep.product_convention_residual() > 1e-9 && rep.dimension >= 2)
    std::swap(rep.generators[0], rep.generators[1]);
  if (rep.product_convention_residual() > 1e-12)
    throw std::runtime_error("build_clifford: product convention could not be enforced");
  return rep;
}

cplx clifford_trace_product(const CliffordRep& rep, std::span<const int> indices) {
  const int dp = rep.rep_dim();
  Mat prod = Mat::Identity(dp, dp);
  for (int idx : indices) {
    if (idx < 1 || idx > rep.dimension)
      throw std::out_of_range("clifford_trace_product: generator index out of range");
    prod = prod * rep.generators[idx - 1];
  }
  return prod.trace();
}

cplx trace_sigma_dot(const CliffordRep& rep, const std::vector<RealVec>& ys) {
  const int d = rep.dimension;
  if (static_cast<int>(ys.size()) != d)
    throw std::invalid_argument("trace_sigma_dot: expected d vectors");
  const int dp = rep.rep_dim();
  Mat prod = Mat::Identity(dp, dp);
  for (const RealVec& y : ys) {
    if (y.size() != d) throw std::invalid_argument("trace_sigma_dot: vector of wrong dimension");
    Mat dot = Mat::Zero(dp, dp);
    for (int j = 0; j < d; ++j) dot += y(j) * rep.generators[j];
    prod = prod * dot;
  }
  return prod.trace();
}

Simplex Simplex::from_points(const std::vector<RealVec>& x) {
  Simplex s;
  s.vertices = x;
  const int d = static_cast<int>(x.size());
  s.vertices.push_back(RealVec::Zero(d));
  return s;
}

double Simplex::oriented_volume() const {
  const int d = dimension();
  RealMat m(d, d);
  for (int i = 0; i < d; ++i) m.col(i) = vertices[i] - vertices.back();
  return m.determinant() / static_cast<double>(factorial(d));
}

int Simplex::orientation() const {
  const double v = oriented_volume();
  return (v > 0) - (v < 0);
}

bool Simplex::near_degenerate(double rel_tol) const {
  const int d = dimension();
  double scale = 1.0;
  for (int i = 0; i < d; ++i) scale *= (vertices[i] - vertices.back()).norm();
  return std::abs(oriented_volume() * factorial(d)) < rel_tol * scale;
}

cplx key_identity_rhs(const std::vector<RealVec>& xs) {
  const int d = static_cast<int>(xs.size());
  if (d % 2 == 0 || d < 1) throw std::invalid_argument("key_identity_rhs: d must be odd");
  RealMat m(d, d);
  for (int i = 0; i < d; ++i) {
    if (xs[i].size() != d) throw std::invalid_argument("key_identity_rhs: bad vector size");
    m.col(i) = xs[i];
  }
  const cplx coeff = std::pow(2.0, d) *
                     std::pow(cplx(0.0, -std::numbers::pi), (d - 1) / 2) /
                     static_cast<double>(double_factorial(d));
  return coeff * m.determinant();
}

namespace {

RealVec unit_or_zero(const RealVec& v) {
  const double n = v.norm();
  if (n < 1e-14) return RealVec::Zero(v.size());
  return v / n;
}

// Surface area of the unit sphere S^{d-1}.
double sphere_area(int d) {
  if (d == 1) return 2.0;
  if (d == 3) return 4.0 * std::numbers::pi;
  if (d == 5) return 8.0 * std::numbers::pi * std::numbers::pi / 3.0;
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

}  // namespace

McEstimate key_identity_lhs(const CliffordRep& rep, const std::vector<RealVec>& xs,
                            const McIntegrationParams& params) {
  const int d = rep.dimension;
  if (static_cast<int>(xs.size()) != d)
    throw std::invalid_argument("key_identity_lhs: expected d vectors");
  const int dp = rep.rep_dim();

  // Vertices of the closed chain x_1, ..., x_d, x_{d+1} = 0.
  std::vector<RealVec> verts = xs;
  verts.push_back(RealVec::Zero(d));

  double scale = 0.0;
  for (const RealVec& x : xs) scale = std::max(scale, x.norm());
  if (scale == 0.0) scale = 1.0;
  const double r_cut = params.cutoff_factor * scale;

  const auto integrand = [&](const RealVec& x) -> cplx {
    Mat prod = Mat::Identity(dp, dp);
    for (int i = 0; i < d; ++i) {
      const RealVec diff = unit_or_zero(verts[i] + x) - unit_or_zero(verts[i + 1] + x);
      Mat dot = Mat::Zero(dp, dp);
      for (int j = 0; j < d; ++j) dot += diff(j) * rep.generators[j];
      prod = prod * dot;
    }
    return prod.trace();
  };

  // Radial importance law: half-Cauchy with scale s0 truncated at r_cut. Its
  // r^{-2} tail times the r^{d-1} surface factor matches the integrand decay.
  const double s0 = scale;
  const double theta_max = std::atan(r_cut / s0);
  RngStream rng{SplitRng::keyed(params.seed, 0x4b49)};

  double sum_re = 0.0, sum_im = 0.0, sum_sq = 0.0;
  double tail_coeff_sum = 0.0;
  std::size_t tail_count = 0;

  RealVec x(d);
  for (std::size_t n = 0; n < params.samples; ++n) {
    const double r = s0 * std::tan(rng.uniform() * theta_max);
    // Isotropic direction.
    if (d == 1) {
      x(0) = (rng.uniform() < 0.5) ? -r : r;
    } else {
      double nrm2 = 0.0;
      for (int j = 0; j < d; j += 2) {
        const double u1 = std::max(rng.uniform(), 1e-300);
        const double u2 = rng.uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        x(j) = mag * std::cos(2.0 * std::numbers::pi * u2);
        if (j + 1 < d) x(j + 1) = mag * std::sin(2.0 * std::numbers::pi * u2);
      }
      nrm2 = x.squaredNorm();
      if (nrm2 < 1e-280) { x.setZero(); x(0) = 1.0; nrm2 = 1.0; }
      x *= r / std::sqrt(nrm2);
    }

    const double density = (s0 / (s0 * s0 + r * r)) / theta_max /
                           (sphere_area(d) * std::pow(std::max(r, 1e-300), d - 1));
    const cplx f = integrand(x);
    const cplx w = f / density;
    sum_re += w.real();
    sum_im += w.imag();
    sum_sq += std::norm(w);

    if (r > 0.8 * r_cut) {
      tail_coeff_sum += std::abs(f) * std::pow(r, d + 1);
      ++tail_count;
    }
  }

  const double n = static_cast<double>(params.samples);
  McEstimate out;
  out.value = cplx(sum_re / n, sum_im / n);
  const double var = std::max(0.0, sum_sq / n - std::norm(out.value));
  out.std_error = std::sqrt(var / n);
  out.samples = params.samples;
  // |int_{|x|>R} f| <= (mean |f| |x|^{d+1} near the cutoff) * S_{d-1} / R.
  const double tail_coeff = tail_count ? tail_coeff_sum / static_cast<double>(tail_count) : 0.0;
  out.tail_bound = tail_coeff * sphere_area(d) / r_cut;
  const double magnitude = std::abs(out.value);
  out.converged = std::isfinite(out.std_error) &&
                  (out.std_error + out.tail_bound) <
                      std::max(0.1 * magnitude, 1e-9 * std::pow(scale, d));
  return out;
}

}  // namespace oddchern
