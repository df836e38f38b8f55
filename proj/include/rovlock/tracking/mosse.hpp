#pragma once

#include <span>

#include "rovlock/tracking/dcf.hpp"
#include "rovlock/tracking/tracker.hpp"

namespace rovlock::tracking {

/// Running sums behind the MOSSE filter H = A / B, with
/// A = sum conj(G_i) . F_i and B = sum F_i . conj(F_i) + eps.
/// H is applied to a patch spectrum Z as ifft(conj(H) . Z).
struct MosseModel {
  Spectrum numerator;
  Spectrum denominator;
  double learning_rate = 0.125;
  double psr_pause = 5.7;
  double psr_resume = 8.0;
};

/// Throws DegenerateSamples for an empty list and SizeMismatch when a patch
/// differs in size from the target.
MosseModel mosse_train(std::span<const RealMap> patches, const RealMap& target, double epsilon);

/// Elementwise A / B.
Spectrum mosse_filter(const MosseModel& model);

/// Correlation response for an already preprocessed patch.
RealMap mosse_response(const MosseModel& model, const RealMap& patch);

/// A <- (1 - eta) A + eta conj(G) F,  B <- (1 - eta) B + eta F conj(F).
void mosse_update(MosseModel& model, const RealMap& patch, const Spectrum& target_spectrum);

/// Tracker wrapper: pauses (Lost, model frozen, box held) when the PSR drops
/// below psr_pause and resumes once it climbs back to psr_resume.
class MosseTracker final : public Tracker {
 public:
  explicit MosseTracker(const TrackerConfig& config);

  const MosseModel& model() const { return model_; }
  double last_psr() const { return last_psr_; }
  bool paused() const { return paused_; }

 protected:
  void do_init(const Frame& frame, const BBox& roi) override;
  TrackResult do_update(const Frame& frame) override;
  bool recovers_from_loss() const override { return true; }

 private:
  MosseModel model_;
  SearchWindow window_;
  RealMap taper_;
  Spectrum target_spectrum_;
  BBox box_;
  double last_psr_ = 0.0;
  bool paused_ = false;
};

}  // namespace rovlock::tracking
