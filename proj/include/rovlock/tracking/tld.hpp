#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rovlock/tracking/medianflow.hpp"
#include "rovlock/tracking/tracker.hpp"

namespace rovlock::tracking {

/// One fern: pixel-pair comparisons at fixed unit-box positions plus
/// positive/negative counts per binary code.
struct Fern {
  std::vector<std::array<double, 4>> pairs;  // (x1, y1, x2, y2) in the unit box
  std::vector<std::uint32_t> positives;
  std::vector<std::uint32_t> negatives;

  double posterior(std::uint32_t code) const {
    const double p = positives[code];
    const double n = negatives[code];
    return p + n > 0.0 ? p / (p + n) : 0.0;
  }
};

struct TldModel {
  std::vector<Fern> ferns;
  std::vector<RealMap> nn_positive;  // zero-mean, unit-norm templates
  std::vector<RealMap> nn_negative;
  double nn_threshold = 0.6;
  double min_variance = 0.0;
  double base_w = 0.0;
  double base_h = 0.0;
  TldParams params{};
};

struct TldDetection {
  BBox box;
  double similarity = 0.0;
};

/// Scanning windows: base size times scale_base^k, k in [-steps, steps],
/// stepped by stride * window side, kept when fully inside the frame and at
/// least 12 px on each side.
std::vector<BBox> tld_scan_windows(int frame_w, int frame_h, double base_w, double base_h,
                                   const TldParams& params);

/// Zero-mean unit-norm template of `box`; empty when the patch is flat.
std::optional<RealMap> tld_template(const RealMap& gray, const BBox& box, int size);

/// Similarity to the positive set: max over templates of max(0, NCC).
double tld_positive_similarity(const TldModel& model, const RealMap& tmpl);
double tld_negative_similarity(const TldModel& model, const RealMap& tmpl);

/// Fresh model trained on the RoI of `frame`: positives from the RoI and the
/// scanning windows overlapping it by more than 0.6, negatives from windows
/// overlapping it by less than 0.2.
TldModel tld_train_initial(const Frame& frame, const BBox& roi, const TldParams& params, std::uint64_t seed);

/// Variance gate, fern vote, then nearest-neighbour check: a window passes
/// when its positive similarity exceeds both nn_threshold and its negative
/// similarity. Throws NotTrained without positive templates.
std::vector<TldDetection> tld_detect(const TldModel& model, const Frame& frame);

/// Greedy grouping at IoU 0.5; each cluster box is the mean of its members
/// and keeps the best member similarity.
std::vector<TldDetection> tld_cluster(const std::vector<TldDetection>& detections);

struct TldState {
  TldModel model;
  BBox box;
  bool has_track = false;
  int last_positive_added = 0;
  int last_negative_added = 0;
};

/// Median-flow tracking plus detection, fusion and P-N learning for one frame.
TrackResult tld_step(TldState& state, const Frame& prev, const Frame& next);

class TldTracker final : public Tracker {
 public:
  explicit TldTracker(const TrackerConfig& config);
  const TldState& state() const { return state_; }

 protected:
  void do_init(const Frame& frame, const BBox& roi) override;
  TrackResult do_update(const Frame& frame) override;
  bool recovers_from_loss() const override { return true; }

 private:
  TldState state_;
  std::optional<Frame> prev_;
};

}  // namespace rovlock::tracking
