#include "star/prox.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "star/linalg.hpp"

namespace star {

namespace {

void check_tau(double tau, const char* op) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw ParamError(std::string(op) + ": threshold must be finite and >= 0, got " +
                     std::to_string(tau));
  }
}

// Real embedding [[A, -B], [B, A]] of the complex matrix A + iB. Its singular
// values are those of A + iB, each repeated twice, and SVT commutes with the
// embedding, so complex slices can reuse the real Jacobi SVD.
Matrix embed(const ComplexCube& c, std::size_t k) {
  const std::size_t r = c.dims.n1;
  const std::size_t q = c.dims.n2;
  Matrix e(2 * r, 2 * q);
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t i = 0; i < r; ++i) {
      const auto z = c(i, j, k);
      e(i, j) = z.real();
      e(i + r, j + q) = z.real();
      e(i + r, j) = z.imag();
      e(i, j + q) = -z.imag();
    }
  return e;
}

void unembed(const Matrix& e, ComplexCube& c, std::size_t k) {
  const std::size_t r = c.dims.n1;
  const std::size_t q = c.dims.n2;
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t i = 0; i < r; ++i) {
      const double re = 0.5 * (e(i, j) + e(i + r, j + q));
      const double im = 0.5 * (e(i + r, j) - e(i, j + q));
      c(i, j, k) = {re, im};
    }
}

Matrix real_slice(const ComplexCube& c, std::size_t k) {
  Matrix m(c.dims.n1, c.dims.n2);
  for (std::size_t j = 0; j < c.dims.n2; ++j)
    for (std::size_t i = 0; i < c.dims.n1; ++i) m(i, j) = c(i, j, k).real();
  return m;
}

Matrix shrink(const SvdResult& r, double tau) {
  Matrix out(r.u.rows(), r.v.rows());
  for (std::size_t n = 0; n < r.s.size(); ++n) {
    const double s = r.s[n] - tau;
    if (s <= 0.0) break;  // singular values are sorted
    for (std::size_t j = 0; j < r.v.rows(); ++j) {
      const double vs = r.v(j, n) * s;
      for (std::size_t i = 0; i < r.u.rows(); ++i) out(i, j) += r.u(i, n) * vs;
    }
  }
  return out;
}

// Fourier slices 0..n3/2 are independent; the rest are their conjugates.
bool self_conjugate(std::size_t k, std::size_t n3) { return k == 0 || 2 * k == n3; }

}  // namespace

TnnConvention parse_tnn(std::string_view s) {
  if (s == "tsvd") return TnnConvention::TSvd;
  if (s == "mode3-unfold") return TnnConvention::Mode3Unfold;
  throw ParamError("unknown tensor nuclear norm convention '" + std::string(s) + "'");
}

std::string_view to_string(TnnConvention c) {
  return c == TnnConvention::TSvd ? "tsvd" : "mode3-unfold";
}

double soft_threshold(double x, double tau) {
  check_tau(tau, "soft_threshold");
  const double a = std::abs(x) - tau;
  return a > 0.0 ? std::copysign(a, x) : 0.0;
}

Cube soft_threshold(const Cube& x, double tau) {
  check_tau(tau, "soft_threshold");
  Cube out = x;
  for (double& v : out.data()) v = soft_threshold(v, tau);
  return out;
}

Matrix matrix_svt(const Matrix& m, double tau) {
  check_tau(tau, "matrix_svt");
  return shrink(svd(m), tau);
}

double nuclear_norm(const Matrix& m) {
  const SvdResult r = svd(m);
  double s = 0.0;
  for (double v : r.s) s += v;
  return s;
}

Cube tensor_svt(const Cube& t, double tau, TnnConvention conv) {
  check_tau(tau, "tensor_svt");
  if (tau == 0.0) return t;
  if (conv == TnnConvention::Mode3Unfold) {
    return fold(matrix_svt(unfold(t, 3), tau), 3, t.dims());
  }

  const std::size_t n3 = t.dims().n3;
  const double slice_tau = tau / std::sqrt(static_cast<double>(n3));
  ComplexCube f = dft_mode3(t);
  const std::size_t r = t.dims().n1;
  const std::size_t q = t.dims().n2;
  for (std::size_t k = 0; 2 * k <= n3; ++k) {
    if (self_conjugate(k, n3)) {
      const Matrix z = shrink(svd(real_slice(f, k)), slice_tau);
      for (std::size_t j = 0; j < q; ++j)
        for (std::size_t i = 0; i < r; ++i) f(i, j, k) = z(i, j);
    } else {
      unembed(shrink(svd(embed(f, k)), slice_tau), f, k);
      for (std::size_t j = 0; j < q; ++j)
        for (std::size_t i = 0; i < r; ++i) f(i, j, n3 - k) = std::conj(f(i, j, k));
    }
  }

  const ComplexCube back = dft_mode3(f, /*inverse=*/true);
  Cube out(t.dims());
  auto o = out.data();
  double imag_sq = 0.0;
  for (std::size_t n = 0; n < o.size(); ++n) {
    o[n] = back.data[n].real();
    imag_sq += back.data[n].imag() * back.data[n].imag();
  }
  if (std::sqrt(imag_sq) > 1e-8 * fro_norm(t)) {
    throw NumericError("tensor_svt: imaginary residue after inverse DFT");
  }
  return out;
}

double tensor_nuclear_norm(const Cube& t, TnnConvention conv) {
  if (conv == TnnConvention::Mode3Unfold) return nuclear_norm(unfold(t, 3));
  const std::size_t n3 = t.dims().n3;
  const ComplexCube f = dft_mode3(t);
  double total = 0.0;
  for (std::size_t k = 0; k < n3; ++k) {
    if (self_conjugate(k, n3)) {
      total += nuclear_norm(real_slice(f, k));
    } else {
      total += 0.5 * nuclear_norm(embed(f, k));
    }
  }
  return total / std::sqrt(static_cast<double>(n3));
}

}  // namespace star
