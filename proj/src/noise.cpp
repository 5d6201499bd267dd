#include "star/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace star {

namespace {

// splitmix64 finaliser; decorrelates the per-band streams.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 band_rng(std::uint64_t seed, std::uint64_t salt, std::size_t band) {
  return std::mt19937_64(mix(mix(seed ^ salt) + band));
}

constexpr std::uint64_t kGaussianSalt = 0x4741555353ULL;
constexpr std::uint64_t kImpulseSalt = 0x494d50554c53ULL;
constexpr std::uint64_t kDeadLineSalt = 0x444541444cULL;

void check_ratio(double r, const char* name) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw ParamError(std::string(name) + " must lie in [0, 1], got " + std::to_string(r));
  }
}

// First `count` entries of a seeded partial Fisher–Yates shuffle of [0, n).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                    std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(count);
  return idx;
}

}  // namespace

Cube add_gaussian(const Cube& x, double sigma_255, std::uint64_t seed) {
  if (!(sigma_255 >= 0.0) || !std::isfinite(sigma_255)) {
    throw ParamError("gaussian sigma must be finite and >= 0");
  }
  Cube y = x;
  if (sigma_255 == 0.0) return y;
  const double sigma = sigma_255 / 255.0;
  const Dims& d = x.dims();
  const std::size_t plane = d.n1 * d.n2;
  auto data = y.data();
  for (std::size_t k = 0; k < d.n3; ++k) {
    auto rng = band_rng(seed, kGaussianSalt, k);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (std::size_t n = 0; n < plane; ++n) data[plane * k + n] += gauss(rng);
  }
  return y;
}

Cube add_impulse(const Cube& x, double ratio, std::uint64_t seed) {
  check_ratio(ratio, "impulse ratio");
  Cube y = x;
  const Dims& d = x.dims();
  const std::size_t plane = d.n1 * d.n2;
  const auto count = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(plane)));
  if (count == 0) return y;
  auto data = y.data();
  for (std::size_t k = 0; k < d.n3; ++k) {
    auto rng = band_rng(seed, kImpulseSalt, k);
    const auto picked = sample_without_replacement(plane, count, rng);
    const std::size_t salt = count / 2;
    for (std::size_t n = 0; n < count; ++n) {
      data[plane * k + picked[n]] = n < salt ? 1.0 : 0.0;
    }
  }
  return y;
}

Cube add_dead_lines(const Cube& x, double band_ratio, std::uint64_t seed) {
  check_ratio(band_ratio, "dead-line band ratio");
  Cube y = x;
  const Dims& d = x.dims();
  const auto bands =
      static_cast<std::size_t>(std::llround(band_ratio * static_cast<double>(d.n3)));
  if (bands == 0) return y;
  auto rng = band_rng(seed, kDeadLineSalt, d.n3);
  const auto chosen = sample_without_replacement(d.n3, bands, rng);
  for (std::size_t k : chosen) {
    auto brng = band_rng(seed, kDeadLineSalt, k);
    std::uniform_int_distribution<std::size_t> lines(1, std::min<std::size_t>(3, d.n2));
    const auto cols = sample_without_replacement(d.n2, lines(brng), brng);
    for (std::size_t j : cols)
      for (std::size_t i = 0; i < d.n1; ++i) y(i, j, k) = 0.0;
  }
  return y;
}

Cube simulate(const Cube& x, const NoiseSpec& spec) {
  Cube y = add_gaussian(x, spec.sigma_255, mix(spec.seed + 1));
  y = add_impulse(y, spec.impulse_ratio, mix(spec.seed + 2));
  y = add_dead_lines(y, spec.band_ratio, mix(spec.seed + 3));
  if (!y.all_finite()) throw NumericError("simulation produced non-finite samples");
  return y;
}

}  // namespace star
