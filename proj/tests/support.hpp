#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mbep/linalg.hpp"

namespace testing {

// Best matching distance between two small spectra by brute force over
// permutations; independent of the Hungarian solver used by the library.
inline double matched_distance(const std::vector<mbep::Complex>& a, const std::vector<mbep::Complex>& b) {
  if (a.size() != b.size()) return INFINITY;
  std::vector<std::size_t> p(a.size());
  std::iota(p.begin(), p.end(), 0);
  double best = INFINITY;
  do {
    double worst = 0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[p[k]]));
    best = std::min(best, worst);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

// Jordan block of size n at lambda.
inline mbep::ComplexMatrix jordan_block(Eigen::Index n, mbep::Complex lambda) {
  mbep::ComplexMatrix j = lambda * mbep::ComplexMatrix::Identity(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) j(k, k + 1) = 1.0;
  return j;
}

inline mbep::ComplexMatrix direct_sum(const mbep::ComplexMatrix& a, const mbep::ComplexMatrix& b) {
  mbep::ComplexMatrix out = mbep::ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace testing
