#include "rovlock/tracking/medianflow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rovlock/vision/sampling.hpp"

namespace rovlock::tracking {

namespace {

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  const double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + n / 2);
  return 0.5 * (lo + hi);
}

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::vector<double> round_trip_errors(const vision::ImagePyramid& prev, const vision::ImagePyramid& next,
                                      std::span<const Point2> points, const vision::LkParams& lk,
                                      std::vector<vision::PointTrackOutcome>& forward) {
  forward = vision::lk_track_points(prev, next, points, lk);
  std::vector<Point2> ends;
  ends.reserve(points.size());
  for (const auto& f : forward) ends.push_back(f.displaced);
  const auto backward = vision::lk_track_points(next, prev, ends, lk);
  std::vector<double> fb(points.size(), kFbFailed);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (forward[i].status != vision::PointStatus::Ok || backward[i].status != vision::PointStatus::Ok)
      continue;
    fb[i] = distance(points[i], backward[i].displaced);
  }
  return fb;
}

vision::LkParams lk_params(int window, int levels) {
  vision::LkParams p;
  p.window = window;
  p.levels = levels;
  return p;
}

}  // namespace

double fb_error(const Frame& prev, const Frame& next, Point2 point, int window, int levels) {
  const vision::ImagePyramid a(vision::to_gray(prev), levels);
  const vision::ImagePyramid b(vision::to_gray(next), levels);
  std::vector<vision::PointTrackOutcome> forward;
  const Point2 pts[1] = {point};
  return round_trip_errors(a, b, pts, lk_params(window, levels), forward).front();
}

double ncc_patch(const RealMap& a, const RealMap& b) {
  if (!a.same_shape(b)) throw Error(Errc::SizeMismatch, "NCC patches differ in size");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 1e-18 || sbb <= 1e-18) throw Error(Errc::ZeroVariance, "NCC of a constant patch");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<Point2> flow_grid(const BBox& box, int n) {
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) pts.push_back({box.x + (i + 0.5) * box.w / n, box.y + (j + 0.5) * box.h / n});
  return pts;
}

std::vector<std::size_t> keep_best_half(std::span<const double> fb) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < fb.size(); ++i)
    if (std::isfinite(fb[i])) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fb[a] < fb[b]; });
  idx.resize(std::min(idx.size(), (fb.size() + 1) / 2));
  return idx;
}

std::vector<std::size_t> keep_above_median(std::span<const std::size_t> indices,
                                           std::span<const double> score) {
  if (indices.empty()) return {};
  std::vector<double> vals;
  vals.reserve(indices.size());
  for (std::size_t i : indices) vals.push_back(score[i]);
  const double med = median_of(vals);
  std::vector<std::size_t> out;
  for (std::size_t i : indices)
    if (score[i] >= med) out.push_back(i);
  return out;
}

MotionEstimate estimate_motion(std::span<const Point2> from, std::span<const Point2> to) {
  if (from.empty() || from.size() != to.size())
    throw Error(Errc::DegenerateSamples, "motion estimate needs matched, non-empty point sets");
  std::vector<double> dx, dy;
  for (std::size_t i = 0; i < from.size(); ++i) {
    dx.push_back(to[i].x - from[i].x);
    dy.push_back(to[i].y - from[i].y);
  }
  MotionEstimate m;
  m.displacement = {median_of(dx), median_of(dy)};
  std::vector<double> ratios;
  for (std::size_t i = 0; i < from.size(); ++i)
    for (std::size_t j = i + 1; j < from.size(); ++j) {
      const double d0 = distance(from[i], from[j]);
      if (d0 < 1e-9) continue;
      ratios.push_back(distance(to[i], to[j]) / d0);
    }
  m.scale = ratios.empty() ? 1.0 : median_of(ratios);
  return m;
}

MedianFlowStep medianflow_step(const RealMap& prev_gray, const RealMap& next_gray, const BBox& box,
                               const MedianFlowParams& params) {
  MedianFlowStep step;
  step.result = {box, 0.0, TrackStatus::Lost};
  const vision::ImagePyramid a(prev_gray, params.lk_levels);
  const vision::ImagePyramid b(next_gray, params.lk_levels);
  const auto points = flow_grid(box, params.grid);
  std::vector<vision::PointTrackOutcome> forward;
  const auto fb = round_trip_errors(a, b, points, lk_params(params.lk_window, params.lk_levels), forward);

  const auto half = keep_best_half(fb);
  step.after_fb = half.size();
  std::vector<double> ncc(points.size(), -1.0);
  const int nw = params.ncc_window;
  for (std::size_t i : half) {
    const auto& p = points[i];
    const auto& q = forward[i].displaced;
    const RealMap pa = vision::extract_patch(prev_gray, BBox::from_center(p.x, p.y, nw, nw), nw, nw);
    const RealMap pb = vision::extract_patch(next_gray, BBox::from_center(q.x, q.y, nw, nw), nw, nw);
    try {
      ncc[i] = ncc_patch(pa, pb);
    } catch (const Error&) {
      ncc[i] = -1.0;
    }
  }
  const auto kept = keep_above_median(half, ncc);
  step.survivors = kept.size();
  if (kept.empty()) return step;

  std::vector<Point2> from, to;
  std::vector<double> kept_fb;
  for (std::size_t i : kept) {
    from.push_back(points[i]);
    to.push_back(forward[i].displaced);
    kept_fb.push_back(fb[i]);
  }
  step.median_fb = median_of(kept_fb);
  step.motion = estimate_motion(from, to);
  const double conf = 1.0 - std::clamp(step.median_fb / params.fb_threshold, 0.0, 1.0);
  if (static_cast<int>(kept.size()) < params.min_survivors || step.median_fb > params.fb_threshold) {
    step.result.confidence = conf;
    return step;
  }
  const double s = step.motion.scale;
  step.result = {BBox::from_center(box.cx() + step.motion.displacement.x, box.cy() + step.motion.displacement.y,
                                   box.w * s, box.h * s),
                 conf, TrackStatus::Tracking};
  return step;
}

MedianFlowTracker::MedianFlowTracker(const TrackerConfig& config)
    : Tracker(TrackerKind::MedianFlow, config) {}

void MedianFlowTracker::do_init(const Frame& frame, const BBox& roi) {
  prev_ = vision::to_gray(frame);
  box_ = roi;
  last_ = {};
}

TrackResult MedianFlowTracker::do_update(const Frame& frame) {
  RealMap next = vision::to_gray(frame);
  last_ = medianflow_step(prev_, next, box_, config().median_flow);
  prev_ = std::move(next);
  if (!last_.result.lost()) box_ = last_.result.bbox;
  return last_.result;
}

}  // namespace rovlock::tracking
