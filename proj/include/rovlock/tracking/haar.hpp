#pragma once

#include <random>
#include <span>
#include <vector>

#include "rovlock/vision/frame.hpp"
#include "rovlock/vision/integral_image.hpp"

namespace rovlock::tracking {

using vision::BBox;
using vision::IntegralImage;

enum class HaarKind { TwoRectH, TwoRectV, ThreeRect, FourRect };

/// Sub-rectangle in unit-box coordinates with a +1/-1 weight.
struct HaarRect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  double weight = 1.0;
};

/// Every rect of a feature has the same nominal area and the weights sum to
/// zero. ThreeRect is dark-bright-dark across four equal columns (the middle
/// two both +1); FourRect is a 2x2 checkerboard.
struct HaarFeature {
  HaarKind kind = HaarKind::TwoRectH;
  std::vector<HaarRect> rects;
};

/// Feature of `kind` filling the sub-box (x, y, w, h) of the unit box.
HaarFeature make_haar(HaarKind kind, double x, double y, double w, double h);

/// Random kind and placement; the sub-box covers at least 10% of each side.
HaarFeature random_haar(std::mt19937_64& rng);

/// sum_r weight_r * mean(pixels of rect r) / rect count, with each rect
/// mapped into `box` and rounded to whole pixels (at least one pixel wide).
/// Exactly zero on a constant image. Throws OutOfBounds when the box leaves
/// the image.
double haar_eval(const HaarFeature& feature, const IntegralImage& ii, const BBox& box);

/// Whether the pixel-rounded box lies inside the image.
bool box_inside(const IntegralImage& ii, const BBox& box);

/// Running class statistics and the decision rule
///   h(v) = +1 if p v < p theta else -1,
/// with theta the midpoint of the class means and p = +1 when the positive
/// mean lies below the negative one.
class WeakClassifier {
 public:
  WeakClassifier() = default;
  explicit WeakClassifier(HaarFeature feature) : feature_(std::move(feature)) {}

  const HaarFeature& feature() const { return feature_; }
  double threshold() const { return 0.5 * (mu_pos_ + mu_neg_); }
  int polarity() const { return mu_pos_ < mu_neg_ ? 1 : -1; }
  double mean_pos() const { return mu_pos_; }
  double mean_neg() const { return mu_neg_; }
  double var_pos() const { return var_pos_; }
  double var_neg() const { return var_neg_; }

  int classify(double value) const {
    const int p = polarity();
    return p * value < p * threshold() ? 1 : -1;
  }
  double value(const IntegralImage& ii, const BBox& box) const { return haar_eval(feature_, ii, box); }

  /// Blends in the batch mean/variance of one class: mu <- f mu + (1 - f) v.
  /// The first batch of a class is taken outright.
  void observe(std::span<const double> values, bool positive, double forgetting);
  /// Sets the class means directly (tests and hand-built pools).
  void set_means(double mu_pos, double mu_neg);

 private:
  HaarFeature feature_;
  double mu_pos_ = 0.0;
  double mu_neg_ = 0.0;
  double var_pos_ = 1.0;
  double var_neg_ = 1.0;
  bool seen_pos_ = false;
  bool seen_neg_ = false;
};

/// Exhaustive search over the integer offsets with |d| <= radius (stepping by
/// `stride`) around `previous`, skipping boxes that leave the image. Ties go
/// to the offset closest to the previous box. Score -1e300 when nothing fits.
struct SearchHit {
  BBox box;
  double score = 0.0;
};

template <typename Score>
SearchHit search_argmax(const IntegralImage& ii, const BBox& previous, double radius, int stride,
                        Score&& score) {
  const int r = static_cast<int>(radius);
  SearchHit best{previous, -1e300};
  double best_d2 = 1e300;
  bool found = false;
  for (int dy = -r; dy <= r; dy += stride)
    for (int dx = -r; dx <= r; dx += stride) {
      const double d2 = static_cast<double>(dx * dx + dy * dy);
      if (d2 > radius * radius) continue;
      const BBox box{previous.x + dx, previous.y + dy, previous.w, previous.h};
      if (!box_inside(ii, box)) continue;
      const double s = score(box);
      if (!found || s > best.score || (s == best.score && d2 < best_d2)) {
        best = {box, s};
        best_d2 = d2;
        found = true;
      }
    }
  return best;
}

}  // namespace rovlock::tracking
