#include "star/linalg.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace star {

namespace {

constexpr double kJacobiTol = 1e-14;
constexpr int kJacobiMaxSweeps = 60;

double col_dot(const Matrix& a, std::size_t p, std::size_t q) {
  const double* x = a.data().data() + a.rows() * p;
  const double* y = a.data().data() + a.rows() * q;
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) s += x[r] * y[r];
  return s;
}

void rotate_cols(Matrix& a, std::size_t p, std::size_t q, double c, double s) {
  double* x = a.data().data() + a.rows() * p;
  double* y = a.data().data() + a.rows() * q;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double xp = x[r];
    const double yq = y[r];
    x[r] = c * xp - s * yq;
    y[r] = s * xp + c * yq;
  }
}

// Replaces column `col` of u by a unit vector orthogonal to every column in
// `keep`. Used for null singular directions, where w/‖w‖ is meaningless.
void complete_column(Matrix& u, std::size_t col, const std::vector<std::size_t>& keep) {
  const std::size_t m = u.rows();
  // Project every unit vector; at least one keeps norm² >= (m - |keep|) / m.
  std::vector<double> best;
  double best_norm = 0.0;
  for (std::size_t e = 0; e < m; ++e) {
    std::vector<double> v(m, 0.0);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k : keep) {
        double d = 0.0;
        for (std::size_t r = 0; r < m; ++r) d += u(r, k) * v[r];
        for (std::size_t r = 0; r < m; ++r) v[r] -= d * u(r, k);
      }
    }
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n > best_norm + 1e-12) {
      best_norm = n;
      best = std::move(v);
    }
  }
  if (best_norm > 1e-6) {
    for (std::size_t r = 0; r < m; ++r) u(r, col) = best[r] / best_norm;
    return;
  }
  throw NumericError("svd: failed to complete an orthonormal basis");
}

// Jacobi on a tall (rows >= cols) matrix.
SvdResult svd_tall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix w = a;
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = col_dot(w, p, p);
        const double beta = col_dot(w, q, q);
        const double gamma = col_dot(w, p, q);
        if (gamma == 0.0 || alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= kJacobiTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t =
            std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate_cols(w, p, q, c, s);
        rotate_cols(v, p, q, c, s);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = std::sqrt(col_dot(w, j, j));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sv[x] > sv[y]; });

  SvdResult out{Matrix(m, n), std::vector<double>(n), Matrix(n, n)};
  const double smax = sv[order.front()];
  const double null_floor = smax * static_cast<double>(m) * DBL_EPSILON;
  std::vector<std::size_t> accepted;
  std::vector<std::size_t> deficient;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.s[j] = sv[src];
    for (std::size_t r = 0; r < n; ++r) out.v(r, j) = v(r, src);
    if (sv[src] > null_floor && sv[src] > 0.0) {
      for (std::size_t r = 0; r < m; ++r) out.u(r, j) = w(r, src) / sv[src];
      accepted.push_back(j);
    } else {
      deficient.push_back(j);
    }
  }
  for (std::size_t j : deficient) {
    complete_column(out.u, j, accepted);
    accepted.push_back(j);
  }
  return out;
}

void apply_sign_convention(SvdResult& r) {
  for (std::size_t j = 0; j < r.u.cols(); ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.u.rows(); ++i)
      if (std::abs(r.u(i, j)) > std::abs(r.u(best, j))) best = i;
    if (r.u(best, j) < 0.0) {
      for (std::size_t i = 0; i < r.u.rows(); ++i) r.u(i, j) = -r.u(i, j);
      for (std::size_t i = 0; i < r.v.rows(); ++i) r.v(i, j) = -r.v(i, j);
    }
  }
}

}  // namespace

SvdResult svd(const Matrix& m) {
  for (double x : m.data()) {
    if (!std::isfinite(x)) throw NumericError("svd: non-finite input entry");
  }
  SvdResult r;
  if (m.rows() >= m.cols()) {
    r = svd_tall(m);
  } else {
    SvdResult t = svd_tall(m.transpose());
    r = SvdResult{std::move(t.v), std::move(t.s), std::move(t.u)};
  }
  apply_sign_convention(r);
  return r;
}

double spectral_norm(const LinearOp& apply, const LinearOp& apply_adjoint,
                     const Dims& probe_dims, int iters, std::uint64_t seed) {
  if (iters < 1) throw ParamError("spectral_norm: iters must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Cube x(probe_dims);
  for (double& v : x.data()) v = gauss(rng);
  double n = fro_norm(x);
  x = scale(x, 1.0 / n);

  for (int it = 0; it < iters; ++it) {
    Cube z = apply_adjoint(apply(x));
    n = fro_norm(z);
    if (n == 0.0) return 0.0;
    if (!std::isfinite(n)) throw NumericError("spectral_norm: non-finite iterate");
    x = scale(z, 1.0 / n);
  }
  return kSpectralSafety * fro_norm(apply(x));
}

ComplexCube to_complex(const Cube& t) {
  ComplexCube c{t.dims(), std::vector<std::complex<double>>(t.size())};
  auto d = t.data();
  for (std::size_t n = 0; n < d.size(); ++n) c.data[n] = d[n];
  return c;
}

ComplexCube dft_mode3(const ComplexCube& t, bool inverse) {
  const Dims& d = t.dims;
  const std::size_t len = d.n3;
  const double norm = 1.0 / std::sqrt(static_cast<double>(len));
  const double sign = inverse ? 1.0 : -1.0;
  // twiddle[(f·k) mod len]; the index reduction keeps the table exact-periodic.
  std::vector<std::complex<double>> twiddle(len);
  for (std::size_t q = 0; q < len; ++q) {
    const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(q) /
                       static_cast<double>(len);
    twiddle[q] = {std::cos(ang), std::sin(ang)};
  }
  for (std::size_t q = 0; q < len; ++q) {
    if (q == 0) twiddle[q] = 1.0;
    else if (2 * q == len) twiddle[q] = -1.0;
    else if (4 * q == len) twiddle[q] = {0.0, sign};
    else if (4 * q == 3 * len) twiddle[q] = {0.0, -sign};
  }

  ComplexCube out{d, std::vector<std::complex<double>>(t.data.size())};
  const std::size_t slice = d.n1 * d.n2;
  for (std::size_t f = 0; f < len; ++f) {
    std::complex<double>* dst = out.data.data() + slice * f;
    for (std::size_t k = 0; k < len; ++k) {
      const std::complex<double> w = twiddle[(f * k) % len] * norm;
      const std::complex<double>* src = t.data.data() + slice * k;
      for (std::size_t n = 0; n < slice; ++n) dst[n] += w * src[n];
    }
  }
  return out;
}

ComplexCube dft_mode3(const Cube& t, bool inverse) { return dft_mode3(to_complex(t), inverse); }

}  // namespace star
