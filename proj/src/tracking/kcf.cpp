#include "rovlock/tracking/kcf.hpp"

#include <algorithm>
#include <cmath>

#include "rovlock/vision/sampling.hpp"

namespace rovlock::tracking {

Spectrum linear_kernel_auto(std::span<const Spectrum> channels) {
  Spectrum u(channels.front().width(), channels.front().height());
  for (const auto& x : channels)
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += x[i] * std::conj(x[i]);
  return u;
}

void kcf_train_update(KcfModel& model, std::span<const Spectrum> channels, const Spectrum& target) {
  if (channels.empty()) throw Error(Errc::DegenerateSamples, "KCF needs at least one channel");
  const Spectrum u = linear_kernel_auto(channels);
  const double g = model.trained ? model.learning_rate : 1.0;
  if (!model.trained) {
    model.numerator = Spectrum(u.width(), u.height());
    model.denominator = Spectrum(u.width(), u.height());
    model.appearance.assign(channels.size(), Spectrum(u.width(), u.height()));
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    model.numerator[i] = (1.0 - g) * model.numerator[i] + g * target[i] * u[i];
    model.denominator[i] = (1.0 - g) * model.denominator[i] + g * u[i] * (u[i] + model.lambda);
  }
  for (std::size_t c = 0; c < channels.size(); ++c)
    for (std::size_t i = 0; i < u.size(); ++i)
      model.appearance[c][i] = (1.0 - g) * model.appearance[c][i] + g * channels[c][i];
  model.trained = true;
}

KcfDetection kcf_detect(const KcfModel& model, std::span<const Spectrum> channels) {
  if (!model.trained) throw Error(Errc::NotTrained, "KCF model has not been trained");
  if (channels.size() != model.appearance.size())
    throw Error(Errc::SizeMismatch, "channel count differs from the model");
  Spectrum r(model.numerator.width(), model.numerator.height());
  for (std::size_t c = 0; c < channels.size(); ++c)
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += channels[c][i] * std::conj(model.appearance[c][i]);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] *= model.numerator[i] / (model.denominator[i] + 1e-8);
  KcfDetection out;
  out.response = vision::ifft2_real(r);
  const Peak peak = find_peak(out.response);
  out.displacement = {peak.x - r.width() / 2, peak.y - r.height() / 2};
  return out;
}

Spectrum kcf_closed_form(std::span<const RealMap> patches, std::span<const RealMap> targets,
                         double lambda) {
  if (patches.empty() || patches.size() != targets.size())
    throw Error(Errc::DegenerateSamples, "need one target per patch");
  const int w = patches.front().width();
  const int h = patches.front().height();
  Spectrum num(w, h);
  Spectrum den(w, h, Complex(lambda, 0.0));
  for (std::size_t k = 0; k < patches.size(); ++k) {
    const Spectrum f = vision::fft2(patches[k]);
    const Spectrum y = vision::fft2(targets[k]);
    for (std::size_t i = 0; i < f.size(); ++i) {
      num[i] += f[i] * std::conj(y[i]);
      den[i] += f[i] * std::conj(f[i]);
    }
  }
  for (std::size_t i = 0; i < num.size(); ++i) num[i] /= den[i];
  return num;
}

KcfTracker::KcfTracker(const TrackerConfig& config) : Tracker(TrackerKind::KCF, config) {}

std::vector<Spectrum> KcfTracker::features(const RealMap& patch) const {
  std::vector<Spectrum> out;
  for (const auto& ch : gradient_channels(patch, taper_)) out.push_back(vision::fft2(ch));
  return out;
}

void KcfTracker::do_init(const Frame& frame, const BBox& roi) {
  window_ = SearchWindow(roi, 2.0, config().patch_size);
  taper_ = vision::hann_window(window_.width(), window_.height());
  target_spectrum_ = vision::fft2(gaussian_target(
      window_.width(), window_.height(), std::sqrt(window_.target_w() * window_.target_h()) / 16.0));
  model_ = KcfModel{};
  model_.lambda = config().kcf.lambda;
  model_.learning_rate = config().kcf.learning_rate;
  const RealMap gray = vision::to_gray(frame);
  kcf_train_update(model_, features(window_.sample(gray, roi.cx(), roi.cy(), 1.0)), target_spectrum_);
  box_ = roi;
  last_psr_ = 0.0;
}

TrackResult KcfTracker::do_update(const Frame& frame) {
  const RealMap gray = vision::to_gray(frame);
  const auto det = kcf_detect(model_, features(window_.sample(gray, box_.cx(), box_.cy(), 1.0)));
  last_psr_ = psr(det.response);
  last_peak_ = *std::max_element(det.response.data().begin(), det.response.data().end());
  const double confidence = std::clamp(last_psr_ / 20.0, 0.0, 1.0);
  if (last_psr_ < config().kcf.psr_lost || last_peak_ < config().kcf.peak_lost)
    return {box_, confidence, TrackStatus::Lost};

  const auto off = window_.to_frame_offset(det.displacement.x, det.displacement.y, 1.0);
  box_.x += off.x;
  box_.y += off.y;
  kcf_train_update(model_, features(window_.sample(gray, box_.cx(), box_.cy(), 1.0)),
                   target_spectrum_);
  return {box_, confidence, TrackStatus::Tracking};
}

}  // namespace rovlock::tracking
