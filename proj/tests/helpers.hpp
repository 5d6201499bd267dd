#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "star/tensor.hpp"

namespace star::test {

inline Cube random_cube(const Dims& d, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Cube c(d);
  for (double& v : c.data()) v = u(rng);
  return c;
}

inline Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(r, c);
  for (double& v : m.data()) v = g(rng);
  return m;
}

inline double max_abs_diff(const Cube& a, const Cube& b) {
  double w = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) w = std::max(w, std::abs(a.data()[n] - b.data()[n]));
  return w;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double w = 0.0;
  for (std::size_t n = 0; n < a.data().size(); ++n)
    w = std::max(w, std::abs(a.data()[n] - b.data()[n]));
  return w;
}

// Orthonormal matrix from Gram–Schmidt on a Gaussian draw.
inline Matrix random_orthonormal(std::size_t r, std::size_t c, std::uint64_t seed) {
  Matrix m = random_matrix(r, c, seed);
  for (std::size_t j = 0; j < c; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        double d = 0.0;
        for (std::size_t i = 0; i < r; ++i) d += m(i, k) * m(i, j);
        for (std::size_t i = 0; i < r; ++i) m(i, j) -= d * m(i, k);
      }
    double n = 0.0;
    for (std::size_t i = 0; i < r; ++i) n += m(i, j) * m(i, j);
    n = std::sqrt(n);
    for (std::size_t i = 0; i < r; ++i) m(i, j) /= n;
  }
  return m;
}

}  // namespace star::test
