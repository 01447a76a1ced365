#pragma once

#include <Eigen/Dense>

#include <complex>

namespace oddchern {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;
using IntVec = std::vector<int>;

inline constexpr cplx imag_unit{0.0, 1.0};

// (-i)^k for integer k (k may be negative).
inline cplx minus_i_pow(long k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

// i^k for integer k.
inline cplx i_pow(long k) { return minus_i_pow(-k); }

inline long double_factorial(int n) {
  long r = 1;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

inline long factorial(int n) {
  long r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

inline double hermiticity_residual(const Mat& m) { return max_abs(m - m.adjoint()); }

// Signature of a permutation given as 0-based index array (not necessarily of 0..n-1;
// repeated entries give sign 0).
inline int permutation_sign(const std::vector<int>& p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (p[i] == p[j]) return 0;
      if (p[i] > p[j]) sign = -sign;
    }
  return sign;
}

// Pauli matrices.
inline Mat pauli(int j) {
  Mat m(2, 2);
  switch (j) {
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: m.setIdentity();
  }
  return m;
}

}  // namespace oddchern
