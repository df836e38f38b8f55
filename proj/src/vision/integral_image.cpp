#include "rovlock/vision/integral_image.hpp"

#include <cmath>

namespace rovlock::vision {

IntegralImage::IntegralImage(const RealMap& gray) : table_(gray.width() + 1, gray.height() + 1) {
  for (int y = 0; y < gray.height(); ++y) {
    double row = 0.0;
    for (int x = 0; x < gray.width(); ++x) {
      row += gray(x, y);
      table_(x + 1, y + 1) = table_(x + 1, y) + row;
    }
  }
}

IntegralImage integral_image(const Frame& frame) {
  if (frame.channels() != 1)
    throw Error(Errc::InvalidChannelCount, "integral image needs a single-channel frame");
  return IntegralImage(frame.plane(0));
}

double rect_sum(const IntegralImage& ii, const BBox& rect) {
  const int x = static_cast<int>(std::lround(rect.x));
  const int y = static_cast<int>(std::lround(rect.y));
  const int w = static_cast<int>(std::lround(rect.w));
  const int h = static_cast<int>(std::lround(rect.h));
  if (!ii.contains(x, y, w, h)) throw Error(Errc::OutOfBounds, "rectangle outside the image");
  return ii.sum(x, y, w, h);
}

}  // namespace rovlock::vision
