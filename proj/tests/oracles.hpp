#pragma once

// Test-only oracles, independent of the library implementation paths they check.

#include "oddchern/linalg.hpp"
#include "oddchern/rng.hpp"

#include <cmath>
#include <vector>

namespace oddchern::oracles {

// Trace of sigma_{w_1} ... sigma_{w_q} predicted from the algebra relations alone:
// reduce the word by swapping distinct neighbors (sign flip) and cancelling equal
// neighbors, then read off the trace of the ordered result.
inline cplx trace_word(int d, std::vector<int> word) {
  int sign = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
      if (word[i] == word[i + 1]) {
        word.erase(word.begin() + i, word.begin() + i + 2);
        changed = true;
        break;
      }
      if (word[i] > word[i + 1]) {
        std::swap(word[i], word[i + 1]);
        sign = -sign;
        changed = true;
        break;
      }
    }
  }
  const double dp = std::pow(2.0, (d - 1) / 2);
  if (word.empty()) return dp * static_cast<double>(sign);
  if (static_cast<int>(word.size()) == d)
    return static_cast<double>(sign) * dp * minus_i_pow((d - 1) / 2);
  return 0.0;
}

inline RealVec random_vec(RngStream& rng, int d, double scale = 1.0) {
  RealVec v(d);
  for (int i = 0; i < d; ++i) v(i) = scale * (2.0 * rng.uniform() - 1.0);
  return v;
}

// Random simplex vertices with a conditioning floor: |det| >= floor * prod |x_i|,
// so Monte Carlo comparisons are never dominated by a nearly vanishing target.
inline std::vector<RealVec> random_conditioned_simplex(RngStream& rng, int d,
                                                       double floor = 0.05) {
  for (;;) {
    std::vector<RealVec> xs;
    double norms = 1.0;
    for (int i = 0; i < d; ++i) {
      xs.push_back(random_vec(rng, d, 1.5));
      norms *= xs.back().norm();
    }
    RealMat m(d, d);
    for (int i = 0; i < d; ++i) m.col(i) = xs[i];
    if (std::abs(m.determinant()) >= floor * norms) return xs;
  }
}

}  // namespace oddchern::oracles
