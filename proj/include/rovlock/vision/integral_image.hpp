#pragma once

#include "rovlock/vision/frame.hpp"

namespace rovlock::vision {

/// (width+1) x (height+1) summed-area table. Entry (i, j) holds the sum of
/// all pixels with x < i and y < j, so row 0 and column 0 are zero.
class IntegralImage {
 public:
  IntegralImage() = default;
  explicit IntegralImage(const RealMap& gray);

  int width() const { return table_.width() - 1; }
  int height() const { return table_.height() - 1; }

  double entry(int i, int j) const { return table_(i, j); }

  /// Sum over the integer rectangle [x, x+w) x [y, y+h). No bounds checks.
  double sum(int x, int y, int w, int h) const {
    return table_(x + w, y + h) - table_(x, y + h) - table_(x + w, y) + table_(x, y);
  }

  bool contains(int x, int y, int w, int h) const {
    return w > 0 && h > 0 && x >= 0 && y >= 0 && x + w <= width() && y + h <= height();
  }

 private:
  RealMap table_;
};

/// Throws InvalidChannelCount for multi-channel input.
IntegralImage integral_image(const Frame& frame);

/// Pixel sum over an integer-aligned box; throws OutOfBounds outside the image.
double rect_sum(const IntegralImage& ii, const BBox& rect);

}  // namespace rovlock::vision
