#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "star/errors.hpp"

namespace star {

/// Extents of a 3-D cube. Modes are numbered 1..3 to match the usual
/// tensor-algebra convention (mode 3 is the spectral axis).
struct Dims {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t n3 = 0;

  std::size_t operator[](int mode) const;
  std::size_t size() const { return n1 * n2 * n3; }
  Dims with(int mode, std::size_t extent) const;
  std::string str() const;

  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Dense column-major matrix, 64-bit samples.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  /// Builds from nested rows, e.g. {{1, 2}, {3, 4}}.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r + rows_ * c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r + rows_ * c]; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Matrix transpose() const;
  double fro_norm() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

/// Max-abs entry of AᵀA − I; the orthonormality defect of A's columns.
double orthonormality_defect(const Matrix& a);

/// Dense 3-D tensor. Sample (i, j, k) lives at offset i + n1·j + n1·n2·k.
class Cube {
 public:
  Cube() = default;
  explicit Cube(Dims dims, double fill = 0.0);
  Cube(Dims dims, std::vector<double> data);

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }

  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[i + dims_.n1 * (j + dims_.n2 * k)];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[i + dims_.n1 * (j + dims_.n2 * k)];
  }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool all_finite() const;

  friend bool operator==(const Cube&, const Cube&) = default;

 private:
  Dims dims_;
  std::vector<double> data_;
};

// Mode-n matricization with the Kolda–Bader column ordering: the remaining
// indices are linearised with the lower mode varying fastest, i.e.
//   mode 1: column = j + n2·k
//   mode 2: column = i + n1·k
//   mode 3: column = i + n1·j
Matrix unfold(const Cube& t, int mode);
Cube fold(const Matrix& m, int mode, const Dims& dims);

/// t ×ₘ M: replaces extent nₘ by M.rows(). Requires M.cols() == nₘ.
Cube mode_product(const Cube& t, const Matrix& m, int mode);
/// t ×ₘ Mᵀ without materialising the transpose.
Cube mode_product_transposed(const Cube& t, const Matrix& m, int mode);

Cube add(const Cube& a, const Cube& b);
Cube sub(const Cube& a, const Cube& b);
Cube hadamard(const Cube& a, const Cube& b);
Cube scale(const Cube& a, double s);
Cube add(const Cube& a, double s);

/// a + s·b, the common axpy form.
Cube axpy(const Cube& a, double s, const Cube& b);

double fro_norm(const Cube& t);
double dot(const Cube& a, const Cube& b);

}  // namespace star
