#include "rovlock/vision/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rovlock::vision {

namespace {

template <typename Fetch>
double bilinear(int w, int h, double x, double y, Fetch&& fetch) {
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double ax = x - x0;
  const double ay = y - y0;
  const double top = fetch(x0, y0) + ax * (fetch(x1, y0) - fetch(x0, y0));
  const double bottom = fetch(x0, y1) + ax * (fetch(x1, y1) - fetch(x0, y1));
  return top + ay * (bottom - top);
}

void check_out_size(int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) throw Error(Errc::InvalidSize, "patch size must be positive");
}

}  // namespace

double sample_bilinear(const RealMap& map, double x, double y) {
  return bilinear(map.width(), map.height(), x, y, [&](int i, int j) { return map(i, j); });
}

double sample_bilinear(const Frame& frame, double x, double y, int c) {
  return bilinear(frame.width(), frame.height(), x, y,
                  [&](int i, int j) { return frame.at(i, j, c); });
}

Frame extract_patch(const Frame& frame, const BBox& box, int out_w, int out_h) {
  check_out_size(out_w, out_h);
  Frame out(out_w, out_h, frame.channels());
  const double sx = box.w / out_w;
  const double sy = box.h / out_h;
  for (int j = 0; j < out_h; ++j) {
    const double y = box.y + (j + 0.5) * sy - 0.5;
    for (int i = 0; i < out_w; ++i) {
      const double x = box.x + (i + 0.5) * sx - 0.5;
      for (int c = 0; c < frame.channels(); ++c) out.at(i, j, c) = sample_bilinear(frame, x, y, c);
    }
  }
  return out;
}

RealMap extract_patch(const RealMap& map, const BBox& box, int out_w, int out_h) {
  check_out_size(out_w, out_h);
  RealMap out(out_w, out_h);
  const double sx = box.w / out_w;
  const double sy = box.h / out_h;
  for (int j = 0; j < out_h; ++j) {
    const double y = box.y + (j + 0.5) * sy - 0.5;
    for (int i = 0; i < out_w; ++i)
      out(i, j) = sample_bilinear(map, box.x + (i + 0.5) * sx - 0.5, y);
  }
  return out;
}

RealMap hann_window(int w, int h) {
  if (w < 2 || h < 2) throw Error(Errc::InvalidSize, "hann window needs w, h >= 2");
  auto raised = [](int i, int n) {
    return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
  };
  RealMap out(w, h);
  for (int y = 0; y < h; ++y) {
    const double wy = raised(y, h);
    for (int x = 0; x < w; ++x) out(x, y) = raised(x, w) * wy;
  }
  return out;
}

RealMap gradient_x(const RealMap& map) {
  RealMap out(map.width(), map.height());
  const int w = map.width();
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < w; ++x)
      out(x, y) = 0.5 * (map(std::min(x + 1, w - 1), y) - map(std::max(x - 1, 0), y));
  return out;
}

RealMap gradient_y(const RealMap& map) {
  RealMap out(map.width(), map.height());
  const int h = map.height();
  for (int y = 0; y < h; ++y) {
    const int up = std::max(y - 1, 0);
    const int down = std::min(y + 1, h - 1);
    for (int x = 0; x < map.width(); ++x) out(x, y) = 0.5 * (map(x, down) - map(x, up));
  }
  return out;
}

RealMap pyr_down(const RealMap& map) {
  static constexpr double kTaps[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const int w = map.width();
  const int h = map.height();
  RealMap rows(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += kTaps[k + 2] * map(std::clamp(x + k, 0, w - 1), y);
      rows(x, y) = acc;
    }
  const int ow = (w + 1) / 2;
  const int oh = (h + 1) / 2;
  RealMap out(ow, oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += kTaps[k + 2] * rows(2 * x, std::clamp(2 * y + k, 0, h - 1));
      out(x, y) = acc;
    }
  return out;
}

}  // namespace rovlock::vision
