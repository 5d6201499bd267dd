#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "star/tensor.hpp"

namespace star {

/// Thin SVD: input ≈ u · diag(s) · vᵀ, with k = min(rows, cols) columns.
struct SvdResult {
  Matrix u;
  std::vector<double> s;  // descending, non-negative
  Matrix v;
};

/// One-sided Jacobi SVD. Deterministic: fixed cyclic sweep order, and each
/// column of u is signed so that its largest-magnitude entry is positive.
/// Throws NumericError on non-finite input.
SvdResult svd(const Matrix& m);

using LinearOp = std::function<Cube(const Cube&)>;

/// Power-iteration estimate of the largest singular value of `apply`, scaled
/// by a 1.05 safety factor. Returns 0 for the zero operator.
double spectral_norm(const LinearOp& apply, const LinearOp& apply_adjoint,
                     const Dims& probe_dims, int iters, std::uint64_t seed);

inline constexpr double kSpectralSafety = 1.05;

/// Complex-valued companion of Cube, same storage order.
struct ComplexCube {
  Dims dims;
  std::vector<std::complex<double>> data;

  std::complex<double>& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data[i + dims.n1 * (j + dims.n2 * k)];
  }
  const std::complex<double>& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data[i + dims.n1 * (j + dims.n2 * k)];
  }
};

ComplexCube to_complex(const Cube& t);

/// Unitary DFT of length n3 along every tube t(i, j, :). `inverse` applies the
/// conjugate transform, so dft_mode3(dft_mode3(t), true) == t.
ComplexCube dft_mode3(const ComplexCube& t, bool inverse = false);
ComplexCube dft_mode3(const Cube& t, bool inverse = false);

}  // namespace star
