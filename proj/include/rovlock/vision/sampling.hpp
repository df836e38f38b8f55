#pragma once

#include "rovlock/vision/frame.hpp"

namespace rovlock::vision {

/// Bilinear lookup with replicate-border padding.
double sample_bilinear(const RealMap& map, double x, double y);
double sample_bilinear(const Frame& frame, double x, double y, int c = 0);

/// Resamples `box` to out_w x out_h. Output pixel (i, j) reads the source at
/// (box.x + (i + 0.5) * box.w / out_w - 0.5, ...), i.e. pixel centres map to
/// pixel centres, so an exact 2x reduction averages 2x2 blocks.
Frame extract_patch(const Frame& frame, const BBox& box, int out_w, int out_h);
RealMap extract_patch(const RealMap& map, const BBox& box, int out_w, int out_h);

/// Separable raised cosine 0.5 (1 - cos(2 pi i / (n - 1))); zero on the border.
RealMap hann_window(int w, int h);

/// Central-difference derivatives with replicate borders.
RealMap gradient_x(const RealMap& map);
RealMap gradient_y(const RealMap& map);

/// 5-tap binomial blur followed by 2x decimation.
RealMap pyr_down(const RealMap& map);

}  // namespace rovlock::vision
