#pragma once

#include <array>

#include "star/tensor.hpp"

namespace star {

/// Orthonormal DCT-II analysis matrix of size n×n. Row k holds frequency k;
/// row 0 is the constant 1/√n.
Matrix dct_basis(std::size_t n);

/// The three mode dictionaries of the Tucker data-fit term. Columns are
/// atoms: a patch is synthesised as B ×₁ d1 ×₂ d2 ×₃ d3.
struct DictionarySet {
  Matrix d1;
  Matrix d2;
  Matrix d3;

  /// DCT atoms for a patch of the given extents (the transpose of dct_basis).
  static DictionarySet dct(const Dims& patch_dims);

  /// Extents of the coefficient cube (dictionary column counts).
  Dims code_dims() const { return {d1.cols(), d2.cols(), d3.cols()}; }
  /// Extents of the synthesised patch (dictionary row counts).
  Dims atom_dims() const { return {d1.rows(), d2.rows(), d3.rows()}; }
};

/// Forward: b ×₁ D₁ ×₂ D₂ ×₃ D₃. Adjoint: b ×₁ D₁ᵀ ×₂ D₂ᵀ ×₃ D₃ᵀ.
Cube tucker_apply(const Cube& b, const DictionarySet& d, bool adjoint = false);

}  // namespace star
