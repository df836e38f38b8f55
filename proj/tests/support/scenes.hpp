#pragma once

// Synthetic inputs and brute-force oracles shared by the unit and acceptance
// suites. Nothing here calls into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "rovlock/vision/frame.hpp"

namespace rovlock::testing {

using vision::Frame;
using vision::RealMap;

inline RealMap random_map(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  RealMap m(w, h);
  for (auto& v : m.data()) v = u(rng);
  return m;
}

inline Frame random_frame(int w, int h, std::uint64_t seed) {
  return Frame::from_map(random_map(w, h, seed));
}

/// Smooth texture: a sum of random oriented sinusoids around 0.5.
inline double texture_value(double x, double y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(0.15, 0.6);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  double acc = 0.0;
  constexpr int kWaves = 24;
  for (int k = 0; k < kWaves; ++k) {
    const double f = freq(rng);
    const double a = angle(rng);
    const double phase = angle(rng);
    acc += std::sin(f * (std::cos(a) * x + std::sin(a) * y) + phase);
  }
  return 0.5 + 0.2 * acc / std::sqrt(0.5 * kWaves);
}

/// `(ox, oy)` translates the pattern, so shifted copies are exact.
inline Frame textured_frame(int w, int h, std::uint64_t seed, double ox = 0.0, double oy = 0.0) {
  Frame f(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      f.at(x, y) = std::clamp(texture_value(x - ox, y - oy, seed), 0.0, 1.0);
  return f;
}

/// Coarser, higher-contrast texture magnified by `zoom` about (cx, cy).
inline Frame zoomed_frame(int w, int h, std::uint64_t seed, double cx, double cy, double zoom) {
  constexpr double kCoarse = 0.8;
  Frame f(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double v = texture_value(kCoarse * (cx + (x - cx) / zoom), kCoarse * (cy + (y - cy) / zoom), seed);
      f.at(x, y) = std::clamp(0.5 + (v - 0.5) / kCoarse, 0.0, 1.0);
    }
  return f;
}

/// r(s) = sum_x a(x + s) b(x), indices modulo the size.
inline RealMap naive_circular_correlation(const RealMap& a, const RealMap& b) {
  const int w = a.width(), h = a.height();
  RealMap r(w, h);
  for (int sy = 0; sy < h; ++sy)
    for (int sx = 0; sx < w; ++sx) {
      double acc = 0.0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) acc += a((x + sx) % w, (y + sy) % h) * b(x, y);
      r(sx, sy) = acc;
    }
  return r;
}

/// O(N^2) DFT used to cross-check closed forms independently of FFTW.
inline std::vector<std::complex<double>> naive_dft(const RealMap& m) {
  const int w = m.width(), h = m.height();
  std::vector<std::complex<double>> out(static_cast<std::size_t>(w) * h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      std::complex<double> acc = 0.0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          acc += m(x, y) * std::polar(1.0, -2.0 * M_PI * (double(u) * x / w + double(v) * y / h));
      out[static_cast<std::size_t>(v) * w + u] = acc;
    }
  return out;
}

/// Real part of the O(N^2) inverse DFT (with the 1/N factor).
inline RealMap naive_idft_real(const std::vector<std::complex<double>>& spec, int w, int h) {
  RealMap out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::complex<double> acc = 0.0;
      for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
          acc += spec[static_cast<std::size_t>(v) * w + u] *
                 std::polar(1.0, 2.0 * M_PI * (double(u) * x / w + double(v) * y / h));
      out(x, y) = acc.real() / (static_cast<double>(w) * h);
    }
  return out;
}

/// sum_i ||corr(x_i, h) - y_i||^2 + lambda ||h||^2 with naive correlation.
inline double ridge_objective(const std::vector<RealMap>& xs, const std::vector<RealMap>& ys,
                              const RealMap& h, double lambda) {
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const RealMap r = naive_circular_correlation(xs[i], h);
    for (std::size_t k = 0; k < r.size(); ++k) acc += (r[k] - ys[i][k]) * (r[k] - ys[i][k]);
  }
  for (double v : h.data()) acc += lambda * v * v;
  return acc;
}

/// Circular translation: out(x, y) = m(x - dx, y - dy).
inline RealMap circular_shift(const RealMap& m, int dx, int dy) {
  const int w = m.width(), h = m.height();
  RealMap out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out(x, y) = m(((x - dx) % w + w) % w, ((y - dy) % h + h) % h);
  return out;
}

inline double brute_rect_sum(const RealMap& m, int x, int y, int w, int h) {
  double acc = 0.0;
  for (int j = y; j < y + h; ++j)
    for (int i = x; i < x + w; ++i) acc += m(i, j);
  return acc;
}

inline double max_abs_diff(const RealMap& a, const RealMap& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace rovlock::testing
