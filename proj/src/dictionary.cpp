#include "star/dictionary.hpp"

#include <cmath>
#include <numbers>

namespace star {

Matrix dct_basis(std::size_t n) {
  if (n == 0) throw DimsError("dct_basis: size must be positive");
  Matrix m(n, n);
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double alpha = k == 0 ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn);
    for (std::size_t j = 0; j < n; ++j) {
      m(k, j) = k == 0 ? alpha
                       : alpha * std::cos(std::numbers::pi * (2.0 * j + 1.0) *
                                          static_cast<double>(k) / (2.0 * nn));
    }
  }
  return m;
}

DictionarySet DictionarySet::dct(const Dims& patch_dims) {
  return {dct_basis(patch_dims.n1).transpose(), dct_basis(patch_dims.n2).transpose(),
          dct_basis(patch_dims.n3).transpose()};
}

Cube tucker_apply(const Cube& b, const DictionarySet& d, bool adjoint) {
  const Dims expect = adjoint ? d.atom_dims() : d.code_dims();
  if (b.dims() != expect) {
    throw DimsError("tucker_apply: input " + b.dims().str() + " but dictionaries expect " +
                    expect.str());
  }
  if (adjoint) {
    Cube t = mode_product_transposed(b, d.d1, 1);
    t = mode_product_transposed(t, d.d2, 2);
    return mode_product_transposed(t, d.d3, 3);
  }
  Cube t = mode_product(b, d.d1, 1);
  t = mode_product(t, d.d2, 2);
  return mode_product(t, d.d3, 3);
}

}  // namespace star
