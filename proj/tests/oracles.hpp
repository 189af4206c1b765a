#pragma once

// Closed-form scalar values the tests compare against.

#include <cmath>
#include <complex>
#include <random>

#include "sectorsum/linops.hpp"

namespace oracle {

using sectorsum::Complex;
using sectorsum::Matrix;

inline Matrix diag(std::initializer_list<Complex> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (Complex v : d) m(i, i) = v, ++i;
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline Matrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(d(rng), d(rng));
  return m;
}

}  // namespace oracle
