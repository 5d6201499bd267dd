#include "star/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace star {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3) {
    throw DimsError("mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
}

void check_same_dims(const Cube& a, const Cube& b, const char* op) {
  if (a.dims() != b.dims()) {
    throw DimsError(std::string(op) + ": dims " + a.dims().str() + " vs " +
                    b.dims().str());
  }
}

template <typename F>
Cube zip(const Cube& a, const Cube& b, const char* op, F f) {
  check_same_dims(a, b, op);
  Cube out(a.dims());
  auto x = a.data();
  auto y = b.data();
  auto z = out.data();
  for (std::size_t n = 0; n < z.size(); ++n) z[n] = f(x[n], y[n]);
  return out;
}

}  // namespace

std::size_t Dims::operator[](int mode) const {
  check_mode(mode);
  return mode == 1 ? n1 : (mode == 2 ? n2 : n3);
}

Dims Dims::with(int mode, std::size_t extent) const {
  check_mode(mode);
  Dims d = *this;
  (mode == 1 ? d.n1 : (mode == 2 ? d.n2 : d.n3)) = extent;
  return d;
}

std::string Dims::str() const {
  std::ostringstream os;
  os << n1 << "x" << n2 << "x" << n3;
  return os.str();
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) throw DimsError("matrix extents must be positive");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) throw DimsError("matrix extents must be positive");
  if (data_.size() != rows * cols) {
    throw DimsError("matrix data length " + std::to_string(data_.size()) +
                    " does not match " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw DimsError("empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw DimsError("ragged matrix rows");
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t c = 0; c < cols_; ++c)
    for (std::size_t r = 0; r < rows_; ++r) t(c, r) = (*this)(r, c);
  return t;
}

double Matrix::fro_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimsError("matrix product: " + std::to_string(a.cols()) + " vs " +
                    std::to_string(b.rows()));
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      for (std::size_t i = 0; i < a.rows(); ++i) c(i, j) += a(i, k) * bkj;
    }
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimsError("matrix difference");
  Matrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t n = 0; n < cd.size(); ++n) cd[n] -= bd[n];
  return c;
}

double orthonormality_defect(const Matrix& a) {
  double worst = 0.0;
  for (std::size_t p = 0; p < a.cols(); ++p)
    for (std::size_t q = 0; q < a.cols(); ++q) {
      double s = 0.0;
      for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, p) * a(r, q);
      worst = std::max(worst, std::abs(s - (p == q ? 1.0 : 0.0)));
    }
  return worst;
}

// ---------------------------------------------------------------- Cube

Cube::Cube(Dims dims, double fill) : dims_(dims), data_(dims.size(), fill) {
  if (dims.n1 == 0 || dims.n2 == 0 || dims.n3 == 0) {
    throw DimsError("cube extents must be positive, got " + dims.str());
  }
}

Cube::Cube(Dims dims, std::vector<double> data) : dims_(dims), data_(std::move(data)) {
  if (dims.n1 == 0 || dims.n2 == 0 || dims.n3 == 0) {
    throw DimsError("cube extents must be positive, got " + dims.str());
  }
  if (data_.size() != dims.size()) {
    throw DimsError("cube data length " + std::to_string(data_.size()) +
                    " does not match " + dims.str());
  }
}

bool Cube::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------- mode algebra

Matrix unfold(const Cube& t, int mode) {
  check_mode(mode);
  const Dims& d = t.dims();
  Matrix m(d[mode], d.size() / d[mode]);
  for (std::size_t k = 0; k < d.n3; ++k)
    for (std::size_t j = 0; j < d.n2; ++j)
      for (std::size_t i = 0; i < d.n1; ++i) {
        const double v = t(i, j, k);
        switch (mode) {
          case 1: m(i, j + d.n2 * k) = v; break;
          case 2: m(j, i + d.n1 * k) = v; break;
          default: m(k, i + d.n1 * j) = v; break;
        }
      }
  return m;
}

Cube fold(const Matrix& m, int mode, const Dims& dims) {
  check_mode(mode);
  if (dims.size() == 0 || m.rows() != dims[mode] ||
      m.cols() != dims.size() / dims[mode]) {
    throw DimsError("fold: " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    " matrix cannot fold to " + dims.str() + " along mode " +
                    std::to_string(mode));
  }
  Cube t(dims);
  for (std::size_t k = 0; k < dims.n3; ++k)
    for (std::size_t j = 0; j < dims.n2; ++j)
      for (std::size_t i = 0; i < dims.n1; ++i) {
        switch (mode) {
          case 1: t(i, j, k) = m(i, j + dims.n2 * k); break;
          case 2: t(i, j, k) = m(j, i + dims.n1 * k); break;
          default: t(i, j, k) = m(k, i + dims.n1 * j); break;
        }
      }
  return t;
}

namespace {

// out = t ×ₘ op(M), where op(M)(r, c) = transposed ? M(c, r) : M(r, c).
Cube mode_product_impl(const Cube& t, const Matrix& m, int mode, bool transposed) {
  check_mode(mode);
  const std::size_t out_rows = transposed ? m.cols() : m.rows();
  const std::size_t in_cols = transposed ? m.rows() : m.cols();
  const Dims& d = t.dims();
  if (in_cols != d[mode]) {
    throw DimsError("mode_product: matrix has " + std::to_string(in_cols) +
                    " columns but mode " + std::to_string(mode) + " of " + d.str() +
                    " has extent " + std::to_string(d[mode]));
  }
  auto coef = [&](std::size_t r, std::size_t c) { return transposed ? m(c, r) : m(r, c); };
  Cube out(d.with(mode, out_rows));
  const Dims& o = out.dims();
  switch (mode) {
    case 1:
      for (std::size_t k = 0; k < d.n3; ++k)
        for (std::size_t j = 0; j < d.n2; ++j)
          for (std::size_t c = 0; c < d.n1; ++c) {
            const double v = t(c, j, k);
            if (v == 0.0) continue;
            for (std::size_t r = 0; r < o.n1; ++r) out(r, j, k) += coef(r, c) * v;
          }
      break;
    case 2:
      for (std::size_t k = 0; k < d.n3; ++k)
        for (std::size_t r = 0; r < o.n2; ++r)
          for (std::size_t c = 0; c < d.n2; ++c) {
            const double w = coef(r, c);
            if (w == 0.0) continue;
            for (std::size_t i = 0; i < d.n1; ++i) out(i, r, k) += w * t(i, c, k);
          }
      break;
    default: {
      const std::size_t slice = d.n1 * d.n2;
      auto src = t.data();
      auto dst = out.data();
      for (std::size_t r = 0; r < o.n3; ++r)
        for (std::size_t c = 0; c < d.n3; ++c) {
          const double w = coef(r, c);
          if (w == 0.0) continue;
          const double* s = src.data() + slice * c;
          double* z = dst.data() + slice * r;
          for (std::size_t n = 0; n < slice; ++n) z[n] += w * s[n];
        }
      break;
    }
  }
  return out;
}

}  // namespace

Cube mode_product(const Cube& t, const Matrix& m, int mode) {
  return mode_product_impl(t, m, mode, false);
}

Cube mode_product_transposed(const Cube& t, const Matrix& m, int mode) {
  return mode_product_impl(t, m, mode, true);
}

// ---------------------------------------------------------------- pointwise

Cube add(const Cube& a, const Cube& b) {
  return zip(a, b, "add", [](double x, double y) { return x + y; });
}
Cube sub(const Cube& a, const Cube& b) {
  return zip(a, b, "sub", [](double x, double y) { return x - y; });
}
Cube hadamard(const Cube& a, const Cube& b) {
  return zip(a, b, "hadamard", [](double x, double y) { return x * y; });
}
Cube axpy(const Cube& a, double s, const Cube& b) {
  return zip(a, b, "axpy", [s](double x, double y) { return x + s * y; });
}

Cube scale(const Cube& a, double s) {
  Cube out = a;
  for (double& v : out.data()) v *= s;
  return out;
}

Cube add(const Cube& a, double s) {
  Cube out = a;
  for (double& v : out.data()) v += s;
  return out;
}

double fro_norm(const Cube& t) { return std::sqrt(dot(t, t)); }

double dot(const Cube& a, const Cube& b) {
  check_same_dims(a, b, "dot");
  auto x = a.data();
  auto y = b.data();
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) s += x[n] * y[n];
  return s;
}

}  // namespace star
