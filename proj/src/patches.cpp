#include "star/patches.hpp"

namespace star {

namespace {

std::vector<std::size_t> axis_origins(std::size_t n, std::size_t p, std::size_t s) {
  std::vector<std::size_t> o;
  for (std::size_t x = 0;; x += s) {
    if (x + p >= n) {
      o.push_back(n - p);
      break;
    }
    o.push_back(x);
  }
  return o;
}

void check_patch(const Cube& c, const PatchLayout& layout, const char* op) {
  if (c.dims() != layout.patch_dims) {
    throw DimsError(std::string(op) + ": patch " + c.dims().str() + " vs layout " +
                    layout.patch_dims.str());
  }
}

}  // namespace

PatchLayout plan_patches(const Dims& source_dims, const Dims& patch_dims, const Index3& stride) {
  for (int m = 1; m <= 3; ++m) {
    if (patch_dims[m] == 0 || patch_dims[m] > source_dims[m]) {
      throw DimsError("plan_patches: patch " + patch_dims.str() + " does not fit source " +
                      source_dims.str());
    }
    if (stride[m - 1] == 0) throw DimsError("plan_patches: stride must be >= 1");
    if (patch_dims[m] < source_dims[m] && stride[m - 1] > patch_dims[m]) {
      throw DimsError("plan_patches: stride " + std::to_string(stride[m - 1]) +
                      " exceeds patch extent " + std::to_string(patch_dims[m]) + " on axis " +
                      std::to_string(m) + ", leaving voxels uncovered");
    }
  }
  PatchLayout layout{source_dims, patch_dims, stride, {}};
  const auto o1 = axis_origins(source_dims.n1, patch_dims.n1, stride[0]);
  const auto o2 = axis_origins(source_dims.n2, patch_dims.n2, stride[1]);
  const auto o3 = axis_origins(source_dims.n3, patch_dims.n3, stride[2]);
  layout.origins.reserve(o1.size() * o2.size() * o3.size());
  for (std::size_t a : o1)
    for (std::size_t b : o2)
      for (std::size_t c : o3) layout.origins.push_back({a, b, c});
  return layout;
}

std::vector<Cube> extract(const Cube& g, const PatchLayout& layout) {
  if (g.dims() != layout.source_dims) {
    throw DimsError("extract: source " + g.dims().str() + " vs layout " +
                    layout.source_dims.str());
  }
  const Dims& p = layout.patch_dims;
  std::vector<Cube> out;
  out.reserve(layout.count());
  for (const Index3& o : layout.origins) {
    Cube patch(p);
    for (std::size_t k = 0; k < p.n3; ++k)
      for (std::size_t j = 0; j < p.n2; ++j)
        for (std::size_t i = 0; i < p.n1; ++i)
          patch(i, j, k) = g(o[0] + i, o[1] + j, o[2] + k);
    out.push_back(std::move(patch));
  }
  return out;
}

Cube aggregate(const std::vector<Cube>& patches, const PatchLayout& layout) {
  if (patches.size() != layout.count()) {
    throw DimsError("aggregate: got " + std::to_string(patches.size()) + " patches, layout has " +
                    std::to_string(layout.count()));
  }
  Cube out(layout.source_dims);
  const Dims& p = layout.patch_dims;
  for (std::size_t n = 0; n < patches.size(); ++n) {
    check_patch(patches[n], layout, "aggregate");
    const Index3& o = layout.origins[n];
    for (std::size_t k = 0; k < p.n3; ++k)
      for (std::size_t j = 0; j < p.n2; ++j)
        for (std::size_t i = 0; i < p.n1; ++i)
          out(o[0] + i, o[1] + j, o[2] + k) += patches[n](i, j, k);
  }
  return out;
}

Cube coverage_counts(const PatchLayout& layout) {
  std::vector<Cube> ones(layout.count(), Cube(layout.patch_dims, 1.0));
  return aggregate(ones, layout);
}

CoverageWeights coverage_weights(const Cube& counts, double lambda) {
  if (!(lambda >= 0.0)) throw ParamError("coverage_weights: lambda must be >= 0");
  CoverageWeights cw{Cube(counts.dims()), lambda};
  auto c = counts.data();
  auto w = cw.w.data();
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = 1.0 / (1.0 + lambda * c[n]);
  return cw;
}

CoverageWeights coverage_weights(const PatchLayout& layout, double lambda) {
  return coverage_weights(coverage_counts(layout), lambda);
}

}  // namespace star
