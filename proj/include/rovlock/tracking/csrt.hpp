#pragma once

#include <span>
#include <vector>

#include "rovlock/tracking/dcf.hpp"
#include "rovlock/tracking/tracker.hpp"

namespace rovlock::tracking {

/// Binary foreground mask over `box` (rounded to whole pixels). Foreground
/// probability comes from 32-bin grey histograms of the box against the ring
/// between the box and its 2x inflation, with equal priors; the mask keeps
/// the largest 4-connected component above 0.5 and falls back to all ones
/// when that covers less than 10% of the box.
RealMap csrt_spatial_map(const Frame& frame, const BBox& box);

/// ||m . (ifft(H . X) - y)||^2 + lambda ||h||^2 for one channel.
double csrt_objective(const RealMap& channel, const RealMap& target, const RealMap& mask,
                      double lambda, const Spectrum& filter);

/// Per-channel filters (conjugate form) for the masked ridge problem.
/// Starting from h = 0, each round (i) fills the target outside the mask with
/// the current response and solves the unmasked ridge problem in closed form,
/// then (ii) projects the filter onto the mask support, keeping the
/// projection only when it does not raise the objective. With an all-ones
/// mask one round is exactly conj(X) Y / (|X|^2 + lambda).
std::vector<Spectrum> csrt_solve(std::span<const RealMap> channels, const RealMap& target,
                                 const RealMap& mask, double lambda, int iterations);

/// Moves a patch-centred mask so the centre lands on the origin, the frame
/// in which correlation filters live.
RealMap center_to_origin(const RealMap& mask);

class CsrtTracker final : public Tracker {
 public:
  explicit CsrtTracker(const TrackerConfig& config);

  std::span<const double> channel_weights() const { return weights_; }
  double scale() const { return scale_; }
  double last_psr() const { return last_psr_; }
  const RealMap& patch_mask() const { return patch_mask_; }

  /// Feature extractor override, used to inject synthetic channels in tests.
  using FeatureFn = std::vector<RealMap> (*)(const RealMap& patch, const RealMap& window);
  void set_feature_extractor(FeatureFn fn) { features_ = fn; }

 protected:
  void do_init(const Frame& frame, const BBox& roi) override;
  TrackResult do_update(const Frame& frame) override;

 private:
  RealMap mask_for(const Frame& frame, const BBox& box, double scale) const;
  std::vector<Spectrum> solve_at(const Frame& frame, const RealMap& gray, const BBox& box,
                                 double scale);

  FeatureFn features_ = &gradient_channels;
  SearchWindow window_;
  RealMap taper_;
  RealMap target_;
  std::vector<Spectrum> filters_;
  std::vector<double> weights_;
  RealMap patch_mask_;
  BBox base_;
  double cx_ = 0.0;
  double cy_ = 0.0;
  double scale_ = 1.0;
  double last_psr_ = 0.0;
};

}  // namespace rovlock::tracking
