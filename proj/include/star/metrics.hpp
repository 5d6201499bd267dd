#pragma once

#include <cstddef>

#include "star/tensor.hpp"

namespace star {

inline constexpr double kPsnrMseFloor = 1e-12;  // caps PSNR at 120 dB

/// Band-averaged 10·log₁₀(1 / MSE_b), reference peak 1.0.
double psnr(const Cube& x_hat, const Cube& x_ref);

struct SsimResult {
  double value = 0.0;
  bool full_image_window = false;  // spatial extent < 11: one global window
};

/// Per-band SSIM (11×11 Gaussian window, σ = 1.5, K₁ = 0.01, K₂ = 0.03,
/// range 1), averaged over the valid window positions and then over bands.
/// Inputs are clamped to [0, 1].
SsimResult ssim_detail(const Cube& x_hat, const Cube& x_ref);
double ssim(const Cube& x_hat, const Cube& x_ref);

struct SamResult {
  double value = 0.0;         // radians
  std::size_t skipped = 0;    // pixels where either spectrum is zero
};

/// Mean spectral angle over pixels. Throws MetricUndefined if every pixel is
/// skipped.
SamResult sam_detail(const Cube& x_hat, const Cube& x_ref);
double sam(const Cube& x_hat, const Cube& x_ref);

struct ErgasResult {
  double value = 0.0;
  std::size_t skipped = 0;    // bands whose reference mean is zero
};

/// 100·sqrt(mean_b (RMSE_b / mean_b)²) over bands with a non-zero reference
/// mean. Throws MetricUndefined if no band qualifies.
ErgasResult ergas_detail(const Cube& x_hat, const Cube& x_ref);
double ergas(const Cube& x_hat, const Cube& x_ref);

struct MetricReport {
  double psnr = 0.0;
  double ssim = 0.0;
  double sam = 0.0;
  double ergas = 0.0;
  bool ssim_full_image_window = false;
  std::size_t sam_skipped = 0;
  std::size_t ergas_skipped = 0;
};

MetricReport evaluate(const Cube& x_hat, const Cube& x_ref);

}  // namespace star
