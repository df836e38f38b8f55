#include "rovlock/tracking/dcf.hpp"

#include <algorithm>
#include <cmath>

#include "rovlock/vision/sampling.hpp"

namespace rovlock::tracking {

RealMap gaussian_target(int w, int h, double sigma) {
  if (w < 1 || h < 1 || !(sigma > 0.0)) throw Error(Errc::InvalidSize, "bad gaussian target");
  RealMap g(w, h);
  const int cx = w / 2;
  const int cy = h / 2;
  const double k = -0.5 / (sigma * sigma);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      g(x, y) = std::exp(k * (dx * dx + dy * dy));
    }
  return g;
}

double psr(const RealMap& response, int exclusion) {
  const int side = 2 * exclusion + 1;
  if (exclusion < 0 || response.width() < std::max(side, 11) ||
      response.height() < std::max(side, 11))
    throw Error(Errc::InvalidSize, "response map too small for the PSR exclusion window");
  std::size_t best = 0;
  for (std::size_t i = 1; i < response.size(); ++i)
    if (response[i] > response[best]) best = i;
  const int px = static_cast<int>(best % response.width());
  const int py = static_cast<int>(best / response.width());
  // Sidelobe statistics relative to the peak, so a flat map gives exactly 0.
  const double peak = response[best];
  double sum = 0.0, sum2 = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < response.height(); ++y)
    for (int x = 0; x < response.width(); ++x) {
      if (std::abs(x - px) <= exclusion && std::abs(y - py) <= exclusion) continue;
      sum += response(x, y) - peak;
      ++n;
    }
  if (n == 0) return 0.0;
  const double mean_gap = sum / n;
  for (int y = 0; y < response.height(); ++y)
    for (int x = 0; x < response.width(); ++x) {
      if (std::abs(x - px) <= exclusion && std::abs(y - py) <= exclusion) continue;
      const double d = response(x, y) - peak - mean_gap;
      sum2 += d * d;
    }
  const double stddev = std::sqrt(sum2 / n);
  return -mean_gap / std::max(stddev, 1e-6);
}

Peak find_peak(const RealMap& response) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < response.size(); ++i)
    if (response[i] > response[best]) best = i;
  const int w = response.width();
  const int h = response.height();
  const int px = static_cast<int>(best % w);
  const int py = static_cast<int>(best / w);
  auto vertex = [](double left, double mid, double right) {
    const double denom = left - 2.0 * mid + right;
    if (!(denom < 0.0)) return 0.0;
    return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
  };
  const double ox = vertex(response((px + w - 1) % w, py), response[best], response((px + 1) % w, py));
  const double oy = vertex(response(px, (py + h - 1) % h), response[best], response(px, (py + 1) % h));
  return {px + ox, py + oy, response[best]};
}

double mean_of(const RealMap& map) {
  double s = 0.0;
  for (double v : map.data()) s += v;
  return map.empty() ? 0.0 : s / static_cast<double>(map.size());
}

RealMap normalize_and_window(const RealMap& plane, const RealMap& window) {
  RealMap out = plane;
  const double mean = mean_of(out);
  double norm = 0.0;
  for (auto& v : out.data()) {
    v -= mean;
    norm += v * v;
  }
  norm = std::sqrt(norm);
  const double inv = norm > 1e-12 ? 1.0 / norm : 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= inv * window[i];
  return out;
}

RealMap preprocess_log(const RealMap& patch, const RealMap& window) {
  RealMap logged(patch.width(), patch.height());
  for (std::size_t i = 0; i < patch.size(); ++i) logged[i] = std::log1p(patch[i]);
  return normalize_and_window(logged, window);
}

std::vector<RealMap> gradient_channels(const RealMap& patch, const RealMap& window) {
  RealMap gx = vision::gradient_x(patch);
  RealMap gy = vision::gradient_y(patch);
  for (auto& v : gx.data()) v = std::abs(v);
  for (auto& v : gy.data()) v = std::abs(v);
  std::vector<RealMap> out;
  out.reserve(3);
  out.push_back(normalize_and_window(patch, window));
  out.push_back(normalize_and_window(gx, window));
  out.push_back(normalize_and_window(gy, window));
  return out;
}

SearchWindow::SearchWindow(const BBox& box, double padding, int max_side)
    : base_w_(box.w), base_h_(box.h), padding_(padding) {
  const double win_w = box.w * padding;
  const double win_h = box.h * padding;
  zoom_ = std::min(1.0, static_cast<double>(max_side) / std::max(win_w, win_h));
  tw_ = std::max(16, 2 * static_cast<int>(std::lround(win_w * zoom_ / 2.0)));
  th_ = std::max(16, 2 * static_cast<int>(std::lround(win_h * zoom_ / 2.0)));
}

BBox SearchWindow::region(double cx, double cy, double scale) const {
  const double w = tw_ / zoom_ * scale;
  const double h = th_ / zoom_ * scale;
  return BBox::from_center(cx, cy, w, h);
}

RealMap SearchWindow::sample(const RealMap& gray, double cx, double cy, double scale) const {
  return vision::extract_patch(gray, region(cx, cy, scale), tw_, th_);
}

vision::Point2 SearchWindow::to_frame_offset(double dx, double dy, double scale) const {
  return {dx / zoom_ * scale, dy / zoom_ * scale};
}

}  // namespace rovlock::tracking
