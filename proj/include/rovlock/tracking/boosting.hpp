#pragma once

#include <random>
#include <span>
#include <vector>

#include "rovlock/tracking/haar.hpp"
#include "rovlock/tracking/tracker.hpp"

namespace rovlock::tracking {

struct LabelledBox {
  BBox box;
  int label = 1;  // +1 target, -1 background
};

/// Outcome of one AdaBoost selection pass.
struct AdaBoostRound {
  std::vector<int> selected;    // pool indices, one per slot
  std::vector<double> alpha;    // vote of each selected classifier
  std::vector<double> errors;   // weighted error of each pick before clamping
  std::vector<double> weights;  // sample weights after the last re-weighting
};

/// Weighted error below this (or above 1 minus this) is clamped before alpha.
inline constexpr double kErrorFloor = 1e-4;

/// votes[k][i] is classifier k's +1/-1 output on sample i. For each slot the
/// unused classifier with the smallest weighted error is taken,
/// alpha = 0.5 ln((1 - e) / e) with e clamped, and the weights become
/// w_i exp(-alpha y_i h(x_i)) renormalised. Throws DegenerateSamples unless
/// both labels occur.
AdaBoostRound adaboost_select(const std::vector<std::vector<int>>& votes, std::span<const int> labels,
                              std::vector<double> weights, int slots);

struct BoostModel {
  std::vector<WeakClassifier> pool;
  std::vector<int> selected;
  std::vector<double> alpha;
  std::vector<double> sample_weights;
  double forgetting = 0.85;
};

BoostModel make_boost_model(int pool_size, double forgetting, std::mt19937_64& rng);

/// Updates class statistics of the whole pool on `samples`, re-selects
/// `selectors` classifiers from class-balanced initial weights and replaces
/// the worst unselected pool member with a fresh random feature.
void boost_train_step(BoostModel& model, const IntegralImage& ii, std::span<const LabelledBox> samples,
                      int selectors, std::mt19937_64& rng);

/// sum_t alpha_t h_t(x). Throws NotTrained for a model with no selection.
double boost_classify(const BoostModel& model, const IntegralImage& ii, const BBox& box);

/// Target positives (centre and one-pixel shifts) and background negatives
/// on a ring at `ring_distance` plus random ones inside 2x the ring.
std::vector<LabelledBox> boost_samples(const IntegralImage& ii, const BBox& box, double ring_distance,
                                       std::mt19937_64& rng);

class BoostingTracker final : public Tracker {
 public:
  explicit BoostingTracker(const TrackerConfig& config);
  const BoostModel& model() const { return model_; }

 protected:
  void do_init(const Frame& frame, const BBox& roi) override;
  TrackResult do_update(const Frame& frame) override;

 private:
  BoostModel model_;
  std::mt19937_64 rng_;
  BBox box_;
};

}  // namespace rovlock::tracking
