#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rovlock/error.hpp"

namespace rovlock::vision {

/// Axis-aligned box, corner origin. Shared by the user RoI and tracker output.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double cx() const { return x + 0.5 * w; }
  double cy() const { return y + 0.5 * h; }
  double area() const { return w * h; }
  bool valid() const { return w > 0.0 && h > 0.0; }

  static BBox from_center(double cx, double cy, double w, double h) {
    return {cx - 0.5 * w, cy - 0.5 * h, w, h};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

double intersection_area(const BBox& a, const BBox& b);
double iou(const BBox& a, const BBox& b);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Dense row-major 2-D array without any range constraint. Feature planes,
/// filter responses, weight maps and spectra are all grids.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(checked_size(width, height), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& operator()(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  T* raw() { return data_.data(); }
  const T* raw() const { return data_.data(); }

  bool same_shape(const Grid& o) const { return width_ == o.width_ && height_ == o.height_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static std::size_t checked_size(int w, int h) {
    if (w < 0 || h < 0) throw Error(Errc::InvalidSize, "negative grid dimension");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using RealMap = Grid<double>;

/// Camera image with 1 or 3 interleaved channels, intensities in [0, 1].
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, int channels = 1, double fill = 0.0);

  /// Adopts `data` after checking the length and range invariants.
  static Frame from_data(int width, int height, int channels, std::vector<double> data);
  /// Single-channel frame from a grid; values are clamped into [0, 1].
  static Frame from_map(const RealMap& map);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  double& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool contains(double x, double y) const {
    return x >= 0.0 && y >= 0.0 && x <= width_ - 1 && y <= height_ - 1;
  }

  /// Copies one channel out as a grid.
  RealMap plane(int c = 0) const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<double> data_;
};

/// Luminance 0.299 R + 0.587 G + 0.114 B; single-channel frames pass through.
RealMap to_gray(const Frame& frame);
Frame to_gray_frame(const Frame& frame);

/// Rounds every intensity to the nearest of 256 levels, like an 8-bit sensor.
Frame quantize8(const Frame& frame);

}  // namespace rovlock::vision
