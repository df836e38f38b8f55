#include "rovlock/tracking/csrt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>

#include "rovlock/vision/sampling.hpp"

namespace rovlock::tracking {

namespace {

constexpr int kBins = 32;

int bin_of(double v) { return std::clamp(static_cast<int>(v * kBins), 0, kBins - 1); }

// Largest 4-connected component of the nonzero cells, as a 0/1 map.
RealMap largest_component(const RealMap& fg) {
  const int w = fg.width();
  const int h = fg.height();
  vision::Grid<int> label(w, h, 0);
  int best_label = 0;
  std::size_t best_size = 0;
  int next = 0;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (fg(x, y) <= 0.0 || label(x, y) != 0) continue;
      ++next;
      std::size_t size = 0;
      label(x, y) = next;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        auto [qx, qy] = queue.front();
        queue.pop_front();
        ++size;
        const std::array<std::pair<int, int>, 4> nbrs = {
            {{qx - 1, qy}, {qx + 1, qy}, {qx, qy - 1}, {qx, qy + 1}}};
        for (auto [nx, ny] : nbrs) {
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (fg(nx, ny) <= 0.0 || label(nx, ny) != 0) continue;
          label(nx, ny) = next;
          queue.emplace_back(nx, ny);
        }
      }
      if (size > best_size) {
        best_size = size;
        best_label = next;
      }
    }
  RealMap out(w, h);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (best_label != 0 && label[i] == best_label) ? 1.0 : 0.0;
  return out;
}

double objective_from(const RealMap& response, const RealMap& target, const RealMap& mask,
                      double lambda, const Spectrum& filter) {
  double data = 0.0;
  for (std::size_t i = 0; i < response.size(); ++i) {
    const double d = mask[i] * (response[i] - target[i]);
    data += d * d;
  }
  double energy = 0.0;
  for (const auto& v : filter.data()) energy += std::norm(v);
  return data + lambda * energy / static_cast<double>(filter.size());
}

}  // namespace

RealMap csrt_spatial_map(const Frame& frame, const BBox& box) {
  const int bw = static_cast<int>(std::lround(box.w));
  const int bh = static_cast<int>(std::lround(box.h));
  if (bw < 1 || bh < 1) throw Error(Errc::InvalidRoi, "spatial map needs a non-empty box");
  const int x0 = static_cast<int>(std::lround(box.x));
  const int y0 = static_cast<int>(std::lround(box.y));
  const RealMap gray = vision::to_gray(frame);
  const int fw = gray.width();
  const int fh = gray.height();

  std::array<double, kBins> fg_hist{};
  std::array<double, kBins> bg_hist{};
  double fg_n = 0.0, bg_n = 0.0;
  for (int y = y0; y < y0 + bh; ++y)
    for (int x = x0; x < x0 + bw; ++x) {
      if (x < 0 || y < 0 || x >= fw || y >= fh) continue;
      fg_hist[bin_of(gray(x, y))] += 1.0;
      fg_n += 1.0;
    }
  const int rx0 = x0 - bw / 2;
  const int ry0 = y0 - bh / 2;
  for (int y = std::max(0, ry0); y < std::min(fh, ry0 + 2 * bh); ++y)
    for (int x = std::max(0, rx0); x < std::min(fw, rx0 + 2 * bw); ++x) {
      if (x >= x0 && x < x0 + bw && y >= y0 && y < y0 + bh) continue;
      bg_hist[bin_of(gray(x, y))] += 1.0;
      bg_n += 1.0;
    }

  RealMap fg(bw, bh);
  for (int y = 0; y < bh; ++y)
    for (int x = 0; x < bw; ++x) {
      const int gx = x0 + x;
      const int gy = y0 + y;
      if (gx < 0 || gy < 0 || gx >= fw || gy >= fh) continue;
      const int b = bin_of(gray(gx, gy));
      const double pf = fg_n > 0.0 ? fg_hist[b] / fg_n : 0.0;
      const double pb = bg_n > 0.0 ? bg_hist[b] / bg_n : 0.0;
      const double post = (pf + pb) > 0.0 ? pf / (pf + pb) : 0.0;
      fg(x, y) = post > 0.5 ? 1.0 : 0.0;
    }

  RealMap mask = largest_component(fg);
  double kept = 0.0;
  for (double v : mask.data()) kept += v;
  if (kept < 0.1 * bw * bh) std::fill(mask.data().begin(), mask.data().end(), 1.0);
  return mask;
}

RealMap center_to_origin(const RealMap& mask) {
  const int w = mask.width();
  const int h = mask.height();
  RealMap out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out((x - w / 2 + w) % w, (y - h / 2 + h) % h) = mask(x, y);
  return out;
}

double csrt_objective(const RealMap& channel, const RealMap& target, const RealMap& mask,
                      double lambda, const Spectrum& filter) {
  const RealMap r = vision::ifft2_real(vision::multiply(filter, vision::fft2(channel)));
  return objective_from(r, target, mask, lambda, filter);
}

std::vector<Spectrum> csrt_solve(std::span<const RealMap> channels, const RealMap& target,
                                 const RealMap& mask, double lambda, int iterations) {
  if (channels.empty()) throw Error(Errc::DegenerateSamples, "CSRT needs at least one channel");
  if (!mask.same_shape(target)) throw Error(Errc::SizeMismatch, "mask and target differ");
  if (iterations < 1) throw Error(Errc::InvalidConfig, "CSRT needs at least one iteration");
  const RealMap support = center_to_origin(mask);
  const int w = target.width();
  const int h = target.height();

  std::vector<Spectrum> filters;
  filters.reserve(channels.size());
  for (const auto& x : channels) {
    if (!x.same_shape(target)) throw Error(Errc::SizeMismatch, "channel and target differ");
    const Spectrum xf = vision::fft2(x);
    Spectrum filter(w, h);
    RealMap response(w, h);
    for (int it = 0; it < iterations; ++it) {
      RealMap filled(w, h);
      for (std::size_t i = 0; i < filled.size(); ++i)
        filled[i] = mask[i] * target[i] + (1.0 - mask[i]) * response[i];
      const Spectrum yf = vision::fft2(filled);
      Spectrum ridge(w, h);
      for (std::size_t i = 0; i < ridge.size(); ++i)
        ridge[i] = std::conj(xf[i]) * yf[i] / (std::norm(xf[i]) + lambda);

      // Spatial template h with r = corr(x, h) is real(ifft(conj(H))).
      RealMap spatial = vision::ifft2_real(vision::conj(ridge));
      for (std::size_t i = 0; i < spatial.size(); ++i) spatial[i] *= support[i];
      const Spectrum projected = vision::conj(vision::fft2(spatial));

      const RealMap r_ridge = vision::ifft2_real(vision::multiply(ridge, xf));
      const RealMap r_proj = vision::ifft2_real(vision::multiply(projected, xf));
      const double j_ridge = objective_from(r_ridge, target, mask, lambda, ridge);
      const double j_proj = objective_from(r_proj, target, mask, lambda, projected);
      if (j_proj <= j_ridge) {
        filter = projected;
        response = r_proj;
      } else {
        filter = ridge;
        response = r_ridge;
      }
    }
    filters.push_back(std::move(filter));
  }
  return filters;
}

CsrtTracker::CsrtTracker(const TrackerConfig& config) : Tracker(TrackerKind::CSRT, config) {}

RealMap CsrtTracker::mask_for(const Frame& frame, const BBox& box, double scale) const {
  const RealMap box_mask = csrt_spatial_map(frame, box);
  const BBox reg = window_.region(box.cx(), box.cy(), scale);
  const double sx = reg.w / window_.width();
  const double sy = reg.h / window_.height();
  const double bx = std::round(box.x);
  const double by = std::round(box.y);
  RealMap out(window_.width(), window_.height());
  for (int j = 0; j < out.height(); ++j)
    for (int i = 0; i < out.width(); ++i) {
      const double fx = reg.x + (i + 0.5) * sx - 0.5;
      const double fy = reg.y + (j + 0.5) * sy - 0.5;
      const int mx = static_cast<int>(std::floor(fx - bx + 0.5));
      const int my = static_cast<int>(std::floor(fy - by + 0.5));
      if (mx < 0 || my < 0 || mx >= box_mask.width() || my >= box_mask.height()) continue;
      // The inner half of the box always counts as reliable so the desired
      // peak is never left unconstrained.
      const double u = (fx - box.cx()) / (0.25 * box.w);
      const double v = (fy - box.cy()) / (0.25 * box.h);
      out(i, j) = u * u + v * v <= 1.0 ? 1.0 : box_mask(mx, my);
    }
  return out;
}

std::vector<Spectrum> CsrtTracker::solve_at(const Frame& frame, const RealMap& gray,
                                            const BBox& box, double scale) {
  patch_mask_ = mask_for(frame, box, scale);
  const auto channels = features_(window_.sample(gray, box.cx(), box.cy(), scale), taper_);
  return csrt_solve(channels, target_, patch_mask_, config().csrt.lambda, config().csrt.iterations);
}

void CsrtTracker::do_init(const Frame& frame, const BBox& roi) {
  window_ = SearchWindow(roi, 2.0, config().patch_size);
  taper_ = vision::hann_window(window_.width(), window_.height());
  target_ = gaussian_target(window_.width(), window_.height(),
                            std::sqrt(window_.target_w() * window_.target_h()) / 16.0);
  base_ = roi;
  cx_ = roi.cx();
  cy_ = roi.cy();
  scale_ = 1.0;
  last_psr_ = 0.0;
  const RealMap gray = vision::to_gray(frame);
  filters_ = solve_at(frame, gray, roi, 1.0);
  weights_.assign(filters_.size(), 1.0 / static_cast<double>(filters_.size()));
}

TrackResult CsrtTracker::do_update(const Frame& frame) {
  const auto& p = config().csrt;
  const RealMap gray = vision::to_gray(frame);
  const std::array<double, 3> factors = {1.0, 1.0 - p.scale_step, 1.0 + p.scale_step};

  double best_value = -1e300;
  double best_scale = scale_;
  RealMap best_fused;
  std::vector<double> best_peaks;
  for (double f : factors) {
    const double s = scale_ * f;
    auto channels = features_(window_.sample(gray, cx_, cy_, s), taper_);
    // Unit energy after the taper, so peaks at different scales compare fairly.
    for (auto& ch : channels) {
      double e = 0.0;
      for (double v : ch.data()) e += v * v;
      if (e > 0.0)
        for (double& v : ch.data()) v /= std::sqrt(e);
    }
    RealMap fused(window_.width(), window_.height());
    std::vector<double> peaks(channels.size());
    for (std::size_t c = 0; c < channels.size(); ++c) {
      const RealMap r = vision::ifft2_real(vision::multiply(filters_[c], vision::fft2(channels[c])));
      peaks[c] = *std::max_element(r.data().begin(), r.data().end());
      for (std::size_t i = 0; i < fused.size(); ++i) fused[i] += weights_[c] * r[i];
    }
    const double top = *std::max_element(fused.data().begin(), fused.data().end());
    if (top > best_value) {
      best_value = top;
      best_scale = s;
      best_fused = std::move(fused);
      best_peaks = std::move(peaks);
    }
  }

  last_psr_ = psr(best_fused);
  const double confidence = std::clamp(last_psr_ / 20.0, 0.0, 1.0);
  const BBox held = BBox::from_center(cx_, cy_, base_.w * scale_, base_.h * scale_);
  if (last_psr_ < p.psr_lost) return {held, confidence, TrackStatus::Lost};

  const Peak peak = find_peak(best_fused);
  const auto off = window_.to_frame_offset(peak.x - window_.width() / 2,
                                           peak.y - window_.height() / 2, best_scale);
  cx_ += off.x;
  cy_ += off.y;
  scale_ = best_scale;
  const BBox box = BBox::from_center(cx_, cy_, base_.w * scale_, base_.h * scale_);

  double peak_sum = 0.0;
  for (double& v : best_peaks) {
    v = std::max(0.0, v);
    peak_sum += v;
  }
  if (peak_sum > 0.0) {
    double total = 0.0;
    for (std::size_t c = 0; c < weights_.size(); ++c) {
      weights_[c] = (1.0 - p.reliability_rate) * weights_[c] + p.reliability_rate * best_peaks[c] / peak_sum;
      total += weights_[c];
    }
    for (double& w : weights_) w /= total;
  }

  const auto fresh = solve_at(frame, gray, box, scale_);
  for (std::size_t c = 0; c < filters_.size(); ++c)
    for (std::size_t i = 0; i < filters_[c].size(); ++i)
      filters_[c][i] = (1.0 - p.learning_rate) * filters_[c][i] + p.learning_rate * fresh[c][i];
  return {box, confidence, TrackStatus::Tracking};
}

}  // namespace rovlock::tracking
