#include "rovlock/tracking/tld.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rovlock/vision/integral_image.hpp"
#include "rovlock/vision/sampling.hpp"

namespace rovlock::tracking {

namespace {

using vision::IntegralImage;

// How much more similar a detection must be to replace a running track.
constexpr double kTakeoverMargin = 0.05;

// Binomial [1 4 6 4 1] / 16 blur, replicate borders.
RealMap smooth(const RealMap& src) {
  static constexpr double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const int w = src.width();
  const int h = src.height();
  RealMap tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int t = -2; t <= 2; ++t) acc += k[t + 2] * src(std::clamp(x + t, 0, w - 1), y);
      tmp(x, y) = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int t = -2; t <= 2; ++t) acc += k[t + 2] * tmp(x, std::clamp(y + t, 0, h - 1));
      out(x, y) = acc;
    }
  return out;
}

struct FrameData {
  RealMap gray;
  RealMap blurred;
  IntegralImage sum;
  IntegralImage sum_sq;

  explicit FrameData(const Frame& frame) : gray(vision::to_gray(frame)), blurred(smooth(gray)) {
    RealMap sq = gray;
    for (auto& v : sq.data()) v *= v;
    sum = IntegralImage(gray);
    sum_sq = IntegralImage(sq);
  }

  double variance(const BBox& b) const {
    const int x = static_cast<int>(std::lround(b.x));
    const int y = static_cast<int>(std::lround(b.y));
    const int w = std::max(1, static_cast<int>(std::lround(b.w)));
    const int h = std::max(1, static_cast<int>(std::lround(b.h)));
    if (!sum.contains(x, y, w, h)) return 0.0;
    const double n = static_cast<double>(w) * h;
    const double m = sum.sum(x, y, w, h) / n;
    return std::max(0.0, sum_sq.sum(x, y, w, h) / n - m * m);
  }
};

std::uint32_t fern_code(const Fern& fern, const RealMap& blurred, const BBox& b) {
  const int w = blurred.width();
  const int h = blurred.height();
  auto at = [&](double u, double v) {
    const int x = std::clamp(static_cast<int>(b.x + u * b.w), 0, w - 1);
    const int y = std::clamp(static_cast<int>(b.y + v * b.h), 0, h - 1);
    return blurred(x, y);
  };
  std::uint32_t code = 0;
  for (const auto& p : fern.pairs) code = (code << 1) | (at(p[0], p[1]) > at(p[2], p[3]) ? 1u : 0u);
  return code;
}

double fern_vote(const TldModel& model, const RealMap& blurred, const BBox& b) {
  double acc = 0.0;
  for (const auto& f : model.ferns) acc += f.posterior(fern_code(f, blurred, b));
  return acc / static_cast<double>(model.ferns.size());
}

void fern_learn(TldModel& model, const RealMap& blurred, const BBox& b, bool positive) {
  for (auto& f : model.ferns) {
    const std::uint32_t c = fern_code(f, blurred, b);
    ++(positive ? f.positives : f.negatives)[c];
  }
}

double best_ncc(const std::vector<RealMap>& set, const RealMap& tmpl) {
  double best = 0.0;
  for (const auto& t : set) {
    double dot = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) dot += t[i] * tmpl[i];
    best = std::max(best, dot);
  }
  return best;
}

// Appends a template; once full, the oldest non-initial entry makes room.
void push_template(std::vector<RealMap>& set, RealMap tmpl, int cap) {
  if (static_cast<int>(set.size()) >= cap) set.erase(set.begin() + 1);
  set.push_back(std::move(tmpl));
}

}  // namespace

std::vector<BBox> tld_scan_windows(int frame_w, int frame_h, double base_w, double base_h,
                                   const TldParams& params) {
  std::vector<BBox> out;
  for (int k = -params.scale_steps; k <= params.scale_steps; ++k) {
    const double s = std::pow(params.scale_base, k);
    const double w = std::round(base_w * s);
    const double h = std::round(base_h * s);
    if (w < 12.0 || h < 12.0 || w > frame_w || h > frame_h) continue;
    const double sx = std::max(1.0, std::round(params.stride * w));
    const double sy = std::max(1.0, std::round(params.stride * h));
    for (double y = 0.0; y + h <= frame_h; y += sy)
      for (double x = 0.0; x + w <= frame_w; x += sx) out.push_back({x, y, w, h});
  }
  return out;
}

std::optional<RealMap> tld_template(const RealMap& gray, const BBox& box, int size) {
  RealMap t = vision::extract_patch(gray, box, size, size);
  double mean = 0.0;
  for (double v : t.data()) mean += v;
  mean /= static_cast<double>(t.size());
  double norm = 0.0;
  for (auto& v : t.data()) {
    v -= mean;
    norm += v * v;
  }
  if (norm < 1e-12) return std::nullopt;
  norm = std::sqrt(norm);
  for (auto& v : t.data()) v /= norm;
  return t;
}

double tld_positive_similarity(const TldModel& model, const RealMap& tmpl) {
  return best_ncc(model.nn_positive, tmpl);
}

double tld_negative_similarity(const TldModel& model, const RealMap& tmpl) {
  return best_ncc(model.nn_negative, tmpl);
}

TldModel tld_train_initial(const Frame& frame, const BBox& roi, const TldParams& params, std::uint64_t seed) {
  TldModel model;
  model.params = params;
  model.nn_threshold = params.nn_threshold;
  model.base_w = roi.w;
  model.base_h = roi.h;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  const std::size_t codes = std::size_t{1} << params.comparisons;
  for (int f = 0; f < params.ferns; ++f) {
    Fern fern;
    for (int c = 0; c < params.comparisons; ++c) {
      // Horizontal or vertical pair, as in the original fern design.
      const double a = unit(rng), b = unit(rng), c2 = unit(rng);
      if (c % 2 == 0)
        fern.pairs.push_back({a, b, c2, b});
      else
        fern.pairs.push_back({a, b, a, c2});
    }
    fern.positives.assign(codes, 0);
    fern.negatives.assign(codes, 0);
    model.ferns.push_back(std::move(fern));
  }

  const FrameData data(frame);
  model.min_variance = params.variance_ratio * data.variance(roi);
  if (auto t = tld_template(data.gray, roi, params.template_size)) model.nn_positive.push_back(std::move(*t));
  fern_learn(model, data.blurred, roi, true);

  const auto windows = tld_scan_windows(frame.width(), frame.height(), roi.w, roi.h, params);
  std::vector<BBox> negatives;
  for (const auto& w : windows) {
    const double o = vision::iou(w, roi);
    if (o > 0.6)
      fern_learn(model, data.blurred, w, true);
    else if (o < 0.2 && data.variance(w) >= model.min_variance)
      negatives.push_back(w);
  }
  std::shuffle(negatives.begin(), negatives.end(), rng);
  if (negatives.size() > 200) negatives.resize(200);
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    fern_learn(model, data.blurred, negatives[i], false);
    if (i < 50)
      if (auto t = tld_template(data.gray, negatives[i], params.template_size))
        push_template(model.nn_negative, std::move(*t), params.max_templates);
  }
  return model;
}

std::vector<TldDetection> tld_detect(const TldModel& model, const Frame& frame) {
  if (model.nn_positive.empty()) throw Error(Errc::NotTrained, "TLD model has no positive templates");
  const FrameData data(frame);
  std::vector<TldDetection> out;
  for (const auto& w : tld_scan_windows(frame.width(), frame.height(), model.base_w, model.base_h, model.params)) {
    if (data.variance(w) < model.min_variance) continue;
    if (fern_vote(model, data.blurred, w) <= 0.5) continue;
    const auto t = tld_template(data.gray, w, model.params.template_size);
    if (!t) continue;
    const double sp = tld_positive_similarity(model, *t);
    if (sp > model.nn_threshold && sp > tld_negative_similarity(model, *t)) out.push_back({w, sp});
  }
  return out;
}

std::vector<TldDetection> tld_cluster(const std::vector<TldDetection>& detections) {
  std::vector<TldDetection> sorted = detections;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.similarity > b.similarity; });
  std::vector<bool> taken(sorted.size(), false);
  std::vector<TldDetection> clusters;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (taken[i]) continue;
    BBox acc{};
    int n = 0;
    for (std::size_t j = i; j < sorted.size(); ++j) {
      if (taken[j] || vision::iou(sorted[i].box, sorted[j].box) < 0.5) continue;
      taken[j] = true;
      acc.x += sorted[j].box.x;
      acc.y += sorted[j].box.y;
      acc.w += sorted[j].box.w;
      acc.h += sorted[j].box.h;
      ++n;
    }
    clusters.push_back({{acc.x / n, acc.y / n, acc.w / n, acc.h / n}, sorted[i].similarity});
  }
  return clusters;
}

TrackResult tld_step(TldState& state, const Frame& prev, const Frame& next) {
  TldModel& model = state.model;
  const TldParams& p = model.params;
  const FrameData data(next);
  state.last_positive_added = 0;
  state.last_negative_added = 0;

  std::optional<TldDetection> tracked;
  if (state.has_track) {
    const auto step = medianflow_step(vision::to_gray(prev), data.gray, state.box, p.flow);
    if (!step.result.lost()) {
      const auto t = tld_template(data.gray, step.result.bbox, p.template_size);
      tracked = TldDetection{step.result.bbox, t ? tld_positive_similarity(model, *t) : 0.0};
    }
  }

  const auto detections = tld_detect(model, next);
  const auto clusters = tld_cluster(detections);

  std::optional<TldDetection> final;
  if (tracked) {
    final = tracked;
    // A single confident detection away from the track takes over.
    const TldDetection* better = nullptr;
    int count = 0;
    for (const auto& c : clusters)
      if (vision::iou(c.box, tracked->box) < 0.5 && c.similarity > tracked->similarity + kTakeoverMargin) {
        better = &c;
        ++count;
      }
    if (count == 1) final = *better;
  } else if (!clusters.empty()) {
    final = clusters.front();
  }

  if (!final) {
    state.has_track = false;
    return {state.box, 0.0, TrackStatus::Lost};
  }

  if (final->similarity >= model.nn_threshold) {
    // P-expert: the detector missed a validated track.
    bool detected = false;
    for (const auto& d : detections) detected = detected || vision::iou(d.box, final->box) >= 0.5;
    if (!detected) {
      if (auto t = tld_template(data.gray, final->box, p.template_size)) {
        push_template(model.nn_positive, std::move(*t), p.max_templates);
        ++state.last_positive_added;
      }
      fern_learn(model, data.blurred, final->box, true);
    }
    // N-expert: detections far from the validated track are false alarms.
    for (const auto& d : detections) {
      if (vision::iou(d.box, final->box) >= 0.2) continue;
      if (auto t = tld_template(data.gray, d.box, p.template_size)) {
        push_template(model.nn_negative, std::move(*t), p.max_templates);
        ++state.last_negative_added;
      }
      fern_learn(model, data.blurred, d.box, false);
    }
  }

  state.box = final->box;
  state.has_track = true;
  return {final->box, std::clamp(final->similarity, 0.0, 1.0), TrackStatus::Tracking};
}

TldTracker::TldTracker(const TrackerConfig& config) : Tracker(TrackerKind::TLD, config) {}

void TldTracker::do_init(const Frame& frame, const BBox& roi) {
  state_ = TldState{};
  state_.model = tld_train_initial(frame, roi, config().tld, config().seed);
  state_.box = roi;
  state_.has_track = true;
  prev_ = frame;
}

TrackResult TldTracker::do_update(const Frame& frame) {
  const TrackResult r = tld_step(state_, *prev_, frame);
  prev_ = frame;
  return r;
}

}  // namespace rovlock::tracking
