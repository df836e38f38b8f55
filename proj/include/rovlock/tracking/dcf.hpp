#pragma once

// Pieces shared by the three correlation-filter trackers.
//
// Convention: a filter is stored in "conjugate form" H so that the response
// to a patch with spectrum Z is ifft(H . Z). The desired output y is a
// Gaussian peaking at the patch centre, so a peak at the centre means zero
// displacement.

#include <span>
#include <vector>

#include "rovlock/vision/fft.hpp"
#include "rovlock/vision/frame.hpp"

namespace rovlock::tracking {

using vision::BBox;
using vision::Complex;
using vision::Frame;
using vision::RealMap;
using vision::Spectrum;

/// Gaussian with peak exactly 1 at (w/2, h/2).
RealMap gaussian_target(int w, int h, double sigma);

/// (peak - mean(sidelobes)) / max(std(sidelobes), 1e-6); the sidelobes are
/// everything outside the (2 exclusion + 1)^2 square around the peak.
/// Throws InvalidSize when the map is smaller than that square or than 11x11.
double psr(const RealMap& response, int exclusion = 5);

struct Peak {
  double x = 0.0;  // sub-pixel location
  double y = 0.0;
  double value = 0.0;
};

/// Argmax with a parabolic fit on each axis through the circular neighbours.
Peak find_peak(const RealMap& response);

/// Normalises a plane to zero mean and unit L2 norm, then tapers it.
RealMap normalize_and_window(const RealMap& plane, const RealMap& window);

/// MOSSE preprocessing: log(1 + I), zero mean, unit norm, Hann taper.
RealMap preprocess_log(const RealMap& patch, const RealMap& window);

/// Grey level plus |d/dx| and |d/dy|, each normalised and tapered.
std::vector<RealMap> gradient_channels(const RealMap& patch, const RealMap& window);

/// Geometry of a correlation-filter search window: the box padded by
/// `padding` on each side length, resampled to a fixed template grid.
class SearchWindow {
 public:
  SearchWindow() = default;
  /// `box` sets the base target size; the template grid is chosen so that its
  /// longest side is at most `max_side` pixels (and at least 16).
  SearchWindow(const BBox& box, double padding, int max_side);

  int width() const { return tw_; }
  int height() const { return th_; }
  /// Template pixels per frame pixel at scale 1.
  double zoom() const { return zoom_; }
  double target_w() const { return base_w_ * zoom_; }  // target size in template px
  double target_h() const { return base_h_ * zoom_; }

  /// Frame region sampled for a target centred at (cx, cy) at `scale`.
  BBox region(double cx, double cy, double scale) const;
  RealMap sample(const RealMap& gray, double cx, double cy, double scale) const;
  /// Template offset from the grid centre converted to frame pixels.
  vision::Point2 to_frame_offset(double dx, double dy, double scale) const;

 private:
  double base_w_ = 0.0;
  double base_h_ = 0.0;
  double padding_ = 2.0;
  double zoom_ = 1.0;
  int tw_ = 0;
  int th_ = 0;
};

/// Mean of every value in the map.
double mean_of(const RealMap& map);

}  // namespace rovlock::tracking
