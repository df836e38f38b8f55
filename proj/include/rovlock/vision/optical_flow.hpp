#pragma once

#include <span>
#include <vector>

#include "rovlock/vision/frame.hpp"

namespace rovlock::vision {

enum class PointStatus { Ok, Diverged, OutOfBounds };

struct PointTrackOutcome {
  Point2 point;
  Point2 displaced;
  PointStatus status = PointStatus::Diverged;
  double residual = 0.0;  // mean squared intensity difference over the window
};

struct LkParams {
  int window = 11;
  int levels = 3;
  int max_iterations = 30;
  double epsilon = 0.01;     // px, per-iteration update norm
  double min_eigen = 1e-6;   // smaller eigenvalue of the window-averaged normal matrix
};

/// Gaussian pyramid of a grey image with cached derivatives per level.
class ImagePyramid {
 public:
  ImagePyramid() = default;
  ImagePyramid(const RealMap& gray, int levels);

  int levels() const { return static_cast<int>(images_.size()); }
  const RealMap& image(int level) const { return images_[level]; }
  const RealMap& grad_x(int level) const { return gx_[level]; }
  const RealMap& grad_y(int level) const { return gy_[level]; }

 private:
  std::vector<RealMap> images_;
  std::vector<RealMap> gx_;
  std::vector<RealMap> gy_;
};

/// Iterative pyramidal Lucas-Kanade. Empty input gives empty output.
std::vector<PointTrackOutcome> lk_track_points(const ImagePyramid& prev,
                                               const ImagePyramid& next,
                                               std::span<const Point2> points,
                                               const LkParams& params);

std::vector<PointTrackOutcome> lk_track_points(const Frame& prev, const Frame& next,
                                               std::span<const Point2> points, int window,
                                               int levels);

}  // namespace rovlock::vision
