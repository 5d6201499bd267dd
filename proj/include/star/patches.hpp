#pragma once

#include <array>
#include <vector>

#include "star/tensor.hpp"

namespace star {

using Index3 = std::array<std::size_t, 3>;

/// Placement of the patch-extraction operators over a source cube.
///
/// Origins are generated with a row-major sweep (axis 3 varies fastest) on a
/// regular `stride` grid; along each axis the final origin is clamped to
/// n - p so that every patch lies fully inside the source and every voxel is
/// covered at least once.
/// A stride wider than the patch would leave gaps and is rejected unless the
/// patch spans that axis.
struct PatchLayout {
  Dims source_dims;
  Dims patch_dims;
  Index3 stride{};
  std::vector<Index3> origins;

  std::size_t count() const { return origins.size(); }
};

/// Per-voxel diagonal of (I + λ Σ RᵢᵀRᵢ)⁻¹, i.e. 1 / (1 + λ·coverage).
struct CoverageWeights {
  Cube w;
  double lambda = 0.0;
};

PatchLayout plan_patches(const Dims& source_dims, const Dims& patch_dims, const Index3& stride);

std::vector<Cube> extract(const Cube& g, const PatchLayout& layout);

/// Σᵢ Rᵢᵀ patchᵢ: additive overlap, accumulated in patch-index order.
Cube aggregate(const std::vector<Cube>& patches, const PatchLayout& layout);

/// Number of patches covering each voxel.
Cube coverage_counts(const PatchLayout& layout);

CoverageWeights coverage_weights(const PatchLayout& layout, double lambda);
CoverageWeights coverage_weights(const Cube& counts, double lambda);

}  // namespace star
