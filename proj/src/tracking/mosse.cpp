#include "rovlock/tracking/mosse.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rovlock/vision/sampling.hpp"

namespace rovlock::tracking {

MosseModel mosse_train(std::span<const RealMap> patches, const RealMap& target, double epsilon) {
  if (patches.empty()) throw Error(Errc::DegenerateSamples, "MOSSE needs at least one patch");
  const Spectrum g = vision::fft2(target);
  MosseModel model;
  model.numerator = Spectrum(target.width(), target.height());
  model.denominator = Spectrum(target.width(), target.height(), Complex(epsilon, 0.0));
  for (const auto& patch : patches) {
    if (!patch.same_shape(target)) throw Error(Errc::SizeMismatch, "patch and target differ");
    const Spectrum f = vision::fft2(patch);
    for (std::size_t i = 0; i < f.size(); ++i) {
      model.numerator[i] += std::conj(g[i]) * f[i];
      model.denominator[i] += f[i] * std::conj(f[i]);
    }
  }
  return model;
}

Spectrum mosse_filter(const MosseModel& model) {
  Spectrum h(model.numerator.width(), model.numerator.height());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = model.numerator[i] / model.denominator[i];
  return h;
}

RealMap mosse_response(const MosseModel& model, const RealMap& patch) {
  const Spectrum z = vision::fft2(patch);
  Spectrum r(z.width(), z.height());
  for (std::size_t i = 0; i < z.size(); ++i)
    r[i] = std::conj(model.numerator[i] / model.denominator[i]) * z[i];
  return vision::ifft2_real(r);
}

void mosse_update(MosseModel& model, const RealMap& patch, const Spectrum& target_spectrum) {
  const Spectrum f = vision::fft2(patch);
  const double eta = model.learning_rate;
  for (std::size_t i = 0; i < f.size(); ++i) {
    model.numerator[i] = (1.0 - eta) * model.numerator[i] + eta * std::conj(target_spectrum[i]) * f[i];
    model.denominator[i] = (1.0 - eta) * model.denominator[i] + eta * f[i] * std::conj(f[i]);
  }
}

MosseTracker::MosseTracker(const TrackerConfig& config) : Tracker(TrackerKind::MOSSE, config) {}

void MosseTracker::do_init(const Frame& frame, const BBox& roi) {
  const auto& p = config().mosse;
  window_ = SearchWindow(roi, 2.0, config().patch_size);
  taper_ = vision::hann_window(window_.width(), window_.height());
  const RealMap target = gaussian_target(window_.width(), window_.height(),
                                         std::sqrt(window_.target_w() * window_.target_h()) / 16.0);
  target_spectrum_ = vision::fft2(target);
  const RealMap gray = vision::to_gray(frame);

  // The first frame is augmented with small scale jitters of the RoI.
  std::mt19937_64 rng(config().seed);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  std::vector<RealMap> patches;
  patches.push_back(preprocess_log(window_.sample(gray, roi.cx(), roi.cy(), 1.0), taper_));
  for (int k = 0; k < p.perturbations; ++k) {
    const double s = 1.0 + jitter(rng);
    patches.push_back(preprocess_log(window_.sample(gray, roi.cx(), roi.cy(), s), taper_));
  }
  model_ = mosse_train(patches, target, p.epsilon);
  model_.learning_rate = p.learning_rate;
  model_.psr_pause = p.psr_pause;
  model_.psr_resume = p.psr_resume;
  box_ = roi;
  paused_ = false;
  last_psr_ = 0.0;
}

TrackResult MosseTracker::do_update(const Frame& frame) {
  const RealMap gray = vision::to_gray(frame);
  const RealMap patch = preprocess_log(window_.sample(gray, box_.cx(), box_.cy(), 1.0), taper_);
  const RealMap response = mosse_response(model_, patch);
  last_psr_ = psr(response);
  const double confidence = std::clamp(last_psr_ / 20.0, 0.0, 1.0);

  const double threshold = paused_ ? model_.psr_resume : model_.psr_pause;
  if (last_psr_ < threshold) {
    paused_ = true;
    return {box_, confidence, TrackStatus::Lost};
  }
  paused_ = false;

  const Peak peak = find_peak(response);
  const auto off = window_.to_frame_offset(peak.x - window_.width() / 2,
                                           peak.y - window_.height() / 2, 1.0);
  box_.x += off.x;
  box_.y += off.y;
  const RealMap trained = preprocess_log(window_.sample(gray, box_.cx(), box_.cy(), 1.0), taper_);
  mosse_update(model_, trained, target_spectrum_);
  return {box_, confidence, TrackStatus::Tracking};
}

}  // namespace rovlock::tracking
