#pragma once

#include <span>
#include <vector>

#include "rovlock/tracking/dcf.hpp"
#include "rovlock/tracking/tracker.hpp"

namespace rovlock::tracking {

/// Numerator/denominator model with a linear kernel. U is the kernel
/// auto-correlation of the training patch in the Fourier domain, which for a
/// linear kernel is the power spectrum summed over channels:
///   A_N <- (1 - g) A_N + g Y . U
///   A_D <- (1 - g) A_D + g U . (U + lambda)
/// The training spectra are blended with the same rate and used to form the
/// cross-kernel at detection time.
struct KcfModel {
  Spectrum numerator;
  Spectrum denominator;
  std::vector<Spectrum> appearance;  // per-channel template spectra
  double lambda = 1e-4;
  double learning_rate = 0.02;
  bool trained = false;
};

/// Power spectrum summed over channels.
Spectrum linear_kernel_auto(std::span<const Spectrum> channels);

/// One blend step with the model's learning rate. An untrained model takes
/// the new values outright.
void kcf_train_update(KcfModel& model, std::span<const Spectrum> channels, const Spectrum& target);

struct KcfDetection {
  vision::Point2 displacement;  // template px from the grid centre
  RealMap response;
};

/// Response = ifft((A_N / (A_D + 1e-8)) . K_xz) with K_xz = sum_c Z_c . conj(X_c).
/// Throws NotTrained before the first update.
KcfDetection kcf_detect(const KcfModel& model, std::span<const Spectrum> channels);

/// Ridge-regression filter sum F_i conj(Y_i) / (sum F_i conj(F_i) + lambda)
/// over single-channel samples, i.e. the spectrum of the correlation filter.
Spectrum kcf_closed_form(std::span<const RealMap> patches, std::span<const RealMap> targets,
                         double lambda);

class KcfTracker final : public Tracker {
 public:
  explicit KcfTracker(const TrackerConfig& config);

  const KcfModel& model() const { return model_; }
  double last_psr() const { return last_psr_; }
  double last_peak() const { return last_peak_; }

 protected:
  void do_init(const Frame& frame, const BBox& roi) override;
  TrackResult do_update(const Frame& frame) override;

 private:
  std::vector<Spectrum> features(const RealMap& gray) const;

  KcfModel model_;
  SearchWindow window_;
  RealMap taper_;
  Spectrum target_spectrum_;
  BBox box_;
  double last_psr_ = 0.0;
  double last_peak_ = 0.0;
};

}  // namespace rovlock::tracking
