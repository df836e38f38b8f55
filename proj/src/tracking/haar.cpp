#include "rovlock/tracking/haar.hpp"

#include <algorithm>
#include <cmath>

namespace rovlock::tracking {

namespace {

struct PixelRect {
  int x0, y0, x1, y1;
};

PixelRect to_pixels(const BBox& box) {
  const int x0 = static_cast<int>(std::lround(box.x));
  const int y0 = static_cast<int>(std::lround(box.y));
  const int x1 = std::max(x0 + 1, static_cast<int>(std::lround(box.x + box.w)));
  const int y1 = std::max(y0 + 1, static_cast<int>(std::lround(box.y + box.h)));
  return {x0, y0, x1, y1};
}

}  // namespace

HaarFeature make_haar(HaarKind kind, double x, double y, double w, double h) {
  HaarFeature f;
  f.kind = kind;
  switch (kind) {
    case HaarKind::TwoRectH:
      f.rects = {{x, y, w / 2, h, -1.0}, {x + w / 2, y, w / 2, h, 1.0}};
      break;
    case HaarKind::TwoRectV:
      f.rects = {{x, y, w, h / 2, -1.0}, {x, y + h / 2, w, h / 2, 1.0}};
      break;
    case HaarKind::ThreeRect:
      f.rects = {{x, y, w / 4, h, -1.0},
                 {x + w / 4, y, w / 4, h, 1.0},
                 {x + w / 2, y, w / 4, h, 1.0},
                 {x + 3 * w / 4, y, w / 4, h, -1.0}};
      break;
    case HaarKind::FourRect:
      f.rects = {{x, y, w / 2, h / 2, -1.0},
                 {x + w / 2, y, w / 2, h / 2, 1.0},
                 {x, y + h / 2, w / 2, h / 2, 1.0},
                 {x + w / 2, y + h / 2, w / 2, h / 2, -1.0}};
      break;
  }
  return f;
}

HaarFeature random_haar(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_real_distribution<double> size(0.1, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto k = static_cast<HaarKind>(kind(rng));
  const double w = size(rng);
  const double h = size(rng);
  const double x = unit(rng) * (1.0 - w);
  const double y = unit(rng) * (1.0 - h);
  return make_haar(k, x, y, w, h);
}

bool box_inside(const IntegralImage& ii, const BBox& box) {
  const PixelRect p = to_pixels(box);
  return ii.contains(p.x0, p.y0, p.x1 - p.x0, p.y1 - p.y0);
}

double haar_eval(const HaarFeature& feature, const IntegralImage& ii, const BBox& box) {
  if (!box_inside(ii, box)) throw Error(Errc::OutOfBounds, "Haar feature box leaves the image");
  const PixelRect outer = to_pixels(box);
  double acc = 0.0;
  for (const auto& r : feature.rects) {
    PixelRect p = to_pixels({box.x + r.x * box.w, box.y + r.y * box.h, r.w * box.w, r.h * box.h});
    if (p.x1 > outer.x1) p = {outer.x1 - 1, p.y0, outer.x1, p.y1};
    if (p.y1 > outer.y1) p = {p.x0, outer.y1 - 1, p.x1, outer.y1};
    const int w = p.x1 - p.x0;
    const int h = p.y1 - p.y0;
    acc += r.weight * ii.sum(p.x0, p.y0, w, h) / (static_cast<double>(w) * h);
  }
  return acc / static_cast<double>(feature.rects.size());
}

void WeakClassifier::observe(std::span<const double> values, bool positive, double forgetting) {
  if (values.empty()) return;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());

  double& mu = positive ? mu_pos_ : mu_neg_;
  double& sigma2 = positive ? var_pos_ : var_neg_;
  bool& seen = positive ? seen_pos_ : seen_neg_;
  if (!seen) {
    mu = mean;
    sigma2 = var;
    seen = true;
    return;
  }
  mu = forgetting * mu + (1.0 - forgetting) * mean;
  sigma2 = forgetting * sigma2 + (1.0 - forgetting) * var;
}

void WeakClassifier::set_means(double mu_pos, double mu_neg) {
  mu_pos_ = mu_pos;
  mu_neg_ = mu_neg;
  seen_pos_ = seen_neg_ = true;
}

}  // namespace rovlock::tracking
