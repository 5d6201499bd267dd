#include "star/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace star {

namespace {

constexpr std::size_t kWin = 11;
constexpr double kWinSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void check_dims(const Cube& a, const Cube& b, const char* metric) {
  if (a.dims() != b.dims()) {
    throw DimsError(std::string(metric) + ": " + a.dims().str() + " vs " + b.dims().str());
  }
}

std::array<double, kWin> gaussian_taps() {
  std::array<double, kWin> w{};
  double s = 0.0;
  for (std::size_t i = 0; i < kWin; ++i) {
    const double x = static_cast<double>(i) - 5.0;
    w[i] = std::exp(-x * x / (2.0 * kWinSigma * kWinSigma));
    s += w[i];
  }
  for (double& v : w) v /= s;
  return w;
}

double ssim_formula(double mx, double my, double vx, double vy, double cxy) {
  return ((2.0 * mx * my + kC1) * (2.0 * cxy + kC2)) /
         ((mx * mx + my * my + kC1) * (vx + vy + kC2));
}

// Separable "valid" filtering of an n1×n2 plane with the 11-tap window.
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t n1, std::size_t n2,
                                 const std::array<double, kWin>& w) {
  const std::size_t o1 = n1 - kWin + 1;
  const std::size_t o2 = n2 - kWin + 1;
  std::vector<double> tmp(o1 * n2, 0.0);
  for (std::size_t j = 0; j < n2; ++j)
    for (std::size_t i = 0; i < o1; ++i) {
      double s = 0.0;
      for (std::size_t t = 0; t < kWin; ++t) s += w[t] * img[(i + t) + n1 * j];
      tmp[i + o1 * j] = s;
    }
  std::vector<double> out(o1 * o2, 0.0);
  for (std::size_t j = 0; j < o2; ++j)
    for (std::size_t i = 0; i < o1; ++i) {
      double s = 0.0;
      for (std::size_t t = 0; t < kWin; ++t) s += w[t] * tmp[i + o1 * (j + t)];
      out[i + o1 * j] = s;
    }
  return out;
}

}  // namespace

double psnr(const Cube& x_hat, const Cube& x_ref) {
  check_dims(x_hat, x_ref, "psnr");
  const Dims& d = x_ref.dims();
  const std::size_t plane = d.n1 * d.n2;
  auto a = x_hat.data();
  auto b = x_ref.data();
  double total = 0.0;
  for (std::size_t k = 0; k < d.n3; ++k) {
    double se = 0.0;
    for (std::size_t n = plane * k; n < plane * (k + 1); ++n) {
      const double e = a[n] - b[n];
      se += e * e;
    }
    const double mse = std::max(se / static_cast<double>(plane), kPsnrMseFloor);
    total += 10.0 * std::log10(1.0 / mse);
  }
  return total / static_cast<double>(d.n3);
}

SsimResult ssim_detail(const Cube& x_hat, const Cube& x_ref) {
  check_dims(x_hat, x_ref, "ssim");
  const Dims& d = x_ref.dims();
  const std::size_t plane = d.n1 * d.n2;
  const bool global = d.n1 < kWin || d.n2 < kWin;
  const auto taps = gaussian_taps();
  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };

  double total = 0.0;
  std::vector<double> x(plane), y(plane), xx(plane), yy(plane), xy(plane);
  for (std::size_t k = 0; k < d.n3; ++k) {
    for (std::size_t n = 0; n < plane; ++n) {
      x[n] = clamp01(x_hat.data()[plane * k + n]);
      y[n] = clamp01(x_ref.data()[plane * k + n]);
      xx[n] = x[n] * x[n];
      yy[n] = y[n] * y[n];
      xy[n] = x[n] * y[n];
    }
    if (global) {
      double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
      for (std::size_t n = 0; n < plane; ++n) {
        mx += x[n];
        my += y[n];
        mxx += xx[n];
        myy += yy[n];
        mxy += xy[n];
      }
      const double inv = 1.0 / static_cast<double>(plane);
      mx *= inv, my *= inv, mxx *= inv, myy *= inv, mxy *= inv;
      total += ssim_formula(mx, my, mxx - mx * mx, myy - my * my, mxy - mx * my);
      continue;
    }
    const auto mx = filter_valid(x, d.n1, d.n2, taps);
    const auto my = filter_valid(y, d.n1, d.n2, taps);
    const auto mxx = filter_valid(xx, d.n1, d.n2, taps);
    const auto myy = filter_valid(yy, d.n1, d.n2, taps);
    const auto mxy = filter_valid(xy, d.n1, d.n2, taps);
    double band = 0.0;
    for (std::size_t n = 0; n < mx.size(); ++n) {
      band += ssim_formula(mx[n], my[n], mxx[n] - mx[n] * mx[n], myy[n] - my[n] * my[n],
                           mxy[n] - mx[n] * my[n]);
    }
    total += band / static_cast<double>(mx.size());
  }
  return {total / static_cast<double>(d.n3), global};
}

double ssim(const Cube& x_hat, const Cube& x_ref) { return ssim_detail(x_hat, x_ref).value; }

SamResult sam_detail(const Cube& x_hat, const Cube& x_ref) {
  check_dims(x_hat, x_ref, "sam");
  const Dims& d = x_ref.dims();
  SamResult r;
  double total = 0.0;
  std::size_t used = 0;
  std::vector<double> u(d.n3), v(d.n3);
  for (std::size_t j = 0; j < d.n2; ++j)
    for (std::size_t i = 0; i < d.n1; ++i) {
      double nu = 0.0, nv = 0.0;
      for (std::size_t k = 0; k < d.n3; ++k) {
        u[k] = x_hat(i, j, k);
        v[k] = x_ref(i, j, k);
        nu += u[k] * u[k];
        nv += v[k] * v[k];
      }
      if (nu == 0.0 || nv == 0.0) {
        ++r.skipped;
        continue;
      }
      nu = std::sqrt(nu);
      nv = std::sqrt(nv);
      // Angle between unit vectors as 2·atan2(‖û − v̂‖, ‖û + v̂‖): equal to
      // arccos(⟨u, v⟩ / ‖u‖‖v‖) but exact at zero angle.
      double dm = 0.0, dp = 0.0;
      for (std::size_t k = 0; k < d.n3; ++k) {
        const double a = u[k] / nu;
        const double b = v[k] / nv;
        dm += (a - b) * (a - b);
        dp += (a + b) * (a + b);
      }
      total += 2.0 * std::atan2(std::sqrt(dm), std::sqrt(dp));
      ++used;
    }
  if (used == 0) throw MetricUndefined("sam: every pixel has a zero spectrum");
  r.value = total / static_cast<double>(used);
  return r;
}

double sam(const Cube& x_hat, const Cube& x_ref) { return sam_detail(x_hat, x_ref).value; }

ErgasResult ergas_detail(const Cube& x_hat, const Cube& x_ref) {
  check_dims(x_hat, x_ref, "ergas");
  const Dims& d = x_ref.dims();
  const std::size_t plane = d.n1 * d.n2;
  auto a = x_hat.data();
  auto b = x_ref.data();
  ErgasResult r;
  double acc = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < d.n3; ++k) {
    double se = 0.0, mean = 0.0;
    for (std::size_t n = plane * k; n < plane * (k + 1); ++n) {
      const double e = a[n] - b[n];
      se += e * e;
      mean += b[n];
    }
    mean /= static_cast<double>(plane);
    if (mean == 0.0) {
      ++r.skipped;
      continue;
    }
    const double rmse = std::sqrt(se / static_cast<double>(plane));
    acc += (rmse / mean) * (rmse / mean);
    ++used;
  }
  if (used == 0) throw MetricUndefined("ergas: every reference band has zero mean");
  r.value = 100.0 * std::sqrt(acc / static_cast<double>(used));
  return r;
}

double ergas(const Cube& x_hat, const Cube& x_ref) { return ergas_detail(x_hat, x_ref).value; }

MetricReport evaluate(const Cube& x_hat, const Cube& x_ref) {
  MetricReport m;
  m.psnr = psnr(x_hat, x_ref);
  const SsimResult s = ssim_detail(x_hat, x_ref);
  m.ssim = s.value;
  m.ssim_full_image_window = s.full_image_window;
  const SamResult a = sam_detail(x_hat, x_ref);
  m.sam = a.value;
  m.sam_skipped = a.skipped;
  const ErgasResult e = ergas_detail(x_hat, x_ref);
  m.ergas = e.value;
  m.ergas_skipped = e.skipped;
  return m;
}

}  // namespace star
