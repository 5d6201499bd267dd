#pragma once

#include <cstdint>

#include "star/tensor.hpp"

namespace star {

/// Corruption recipe. Components with a zero amount are skipped; the rest are
/// applied in the order Gaussian → impulse → dead lines.
struct NoiseSpec {
  double sigma_255 = 0.0;     // Gaussian standard deviation on the 0–255 scale
  double impulse_ratio = 0.0;  // salt-and-pepper fraction of pixels per band
  double band_ratio = 0.0;     // fraction of bands receiving dead lines
  std::uint64_t seed = 0;
};

/// y = x + n with n ~ N(0, (σ/255)²) i.i.d.; unclipped.
Cube add_gaussian(const Cube& x, double sigma_255, std::uint64_t seed);

/// In every band, round(ratio·n₁n₂) distinct pixels are replaced: half by 1.0
/// (salt, rounding down) and the rest by 0.0 (pepper).
Cube add_impulse(const Cube& x, double ratio, std::uint64_t seed);

/// round(band_ratio·n₃) bands drawn without replacement each get 1–3 distinct
/// columns (fixed j, every i) zeroed.
Cube add_dead_lines(const Cube& x, double band_ratio, std::uint64_t seed);

Cube simulate(const Cube& x, const NoiseSpec& spec);

}  // namespace star
