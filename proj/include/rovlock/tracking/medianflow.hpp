#pragma once

#include <limits>
#include <span>
#include <vector>

#include "rovlock/tracking/tracker.hpp"
#include "rovlock/vision/optical_flow.hpp"

namespace rovlock::tracking {

using vision::Point2;
using vision::RealMap;

/// Returned by fb_error when either leg of the round trip fails.
inline constexpr double kFbFailed = std::numeric_limits<double>::infinity();

/// Forward-backward error |x - x_hat| of one point tracked prev -> next -> prev.
double fb_error(const Frame& prev, const Frame& next, Point2 point, int window = 11, int levels = 3);

/// Normalised cross-correlation of two equally sized patches. Throws
/// SizeMismatch or ZeroVariance.
double ncc_patch(const RealMap& a, const RealMap& b);

/// n x n points at the cell centres of the box, strictly inside it.
std::vector<Point2> flow_grid(const BBox& box, int n);

/// Indices of the ceil(n/2) smallest finite errors (fewer when not enough
/// are finite), in increasing error order.
std::vector<std::size_t> keep_best_half(std::span<const double> fb);

/// Subset of `indices` whose score is at least the median score among them.
std::vector<std::size_t> keep_above_median(std::span<const std::size_t> indices,
                                           std::span<const double> score);

struct MotionEstimate {
  Point2 displacement;
  double scale = 1.0;
};

/// Median displacement and median ratio of pairwise distances (next over
/// previous). A single point gives scale 1. Throws DegenerateSamples when empty
/// or the spans differ in length.
MotionEstimate estimate_motion(std::span<const Point2> from, std::span<const Point2> to);

struct MedianFlowStep {
  TrackResult result;
  MotionEstimate motion;
  std::size_t after_fb = 0;   // points kept by the FB stage
  std::size_t survivors = 0;  // points kept by both stages
  double median_fb = kFbFailed;
};

/// One frame of grid tracking with FB then NCC filtering.
MedianFlowStep medianflow_step(const RealMap& prev_gray, const RealMap& next_gray, const BBox& box,
                               const MedianFlowParams& params);

class MedianFlowTracker final : public Tracker {
 public:
  explicit MedianFlowTracker(const TrackerConfig& config);
  const MedianFlowStep& last_step() const { return last_; }

 protected:
  void do_init(const Frame& frame, const BBox& roi) override;
  TrackResult do_update(const Frame& frame) override;

 private:
  RealMap prev_;
  BBox box_;
  MedianFlowStep last_;
};

}  // namespace rovlock::tracking
