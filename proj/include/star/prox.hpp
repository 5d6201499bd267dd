#pragma once

#include <string_view>

#include "star/tensor.hpp"

namespace star {

/// How the nuclear norm of a 3-D patch is defined.
///   TSvd        – tubal nuclear norm under the t-product: unitary DFT along
///                 mode 3, then Σₖ ‖X̂ₖ‖_* / √n₃ over the Fourier slices.
///   Mode3Unfold – nuclear norm of the mode-3 unfolding.
enum class TnnConvention { TSvd, Mode3Unfold };

TnnConvention parse_tnn(std::string_view s);
std::string_view to_string(TnnConvention c);

double soft_threshold(double x, double tau);
/// sgn(x)·max(|x| − τ, 0) elementwise. τ < 0 → ParamError.
Cube soft_threshold(const Cube& x, double tau);

/// Proximal operator of τ‖·‖_*: U·diag((s − τ)₊)·Vᵀ.
Matrix matrix_svt(const Matrix& m, double tau);
double nuclear_norm(const Matrix& m);

/// Proximal operator of τ times the configured tensor nuclear norm.
/// For n₃ = 1 the TSvd variant coincides with matrix_svt on the only slice.
Cube tensor_svt(const Cube& t, double tau, TnnConvention conv = TnnConvention::TSvd);
double tensor_nuclear_norm(const Cube& t, TnnConvention conv = TnnConvention::TSvd);

}  // namespace star
