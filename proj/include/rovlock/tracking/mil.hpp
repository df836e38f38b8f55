#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rovlock/tracking/haar.hpp"
#include "rovlock/tracking/tracker.hpp"

namespace rovlock::tracking {

enum class BagLabel { Positive, Negative };

struct Bag {
  std::vector<BBox> instances;
  BagLabel label = BagLabel::Positive;
};

struct BagPair {
  Bag positive;
  Bag negative;
};

/// Positive bag: every integer offset with |d| <= r_pos whose box stays in
/// the frame (the centre box first). Negative bag: `count` boxes with centres
/// drawn uniformly by area from the annulus [r_neg_inner, r_neg_outer],
/// rejecting boxes that leave the frame. Throws InvalidConfig when the radii
/// are out of order and DegenerateSampling when no negative fits.
BagPair mil_bag_sample(const Frame& frame, const BBox& center_box, double r_pos, double r_neg_inner,
                       double r_neg_outer, int count, std::uint64_t seed);

/// 1 - prod(1 - p_i).
double noisy_or(std::span<const double> probabilities);

/// log P(positive bag) + log P(negative bag) under noisy-OR with instance
/// probabilities sigmoid(H), computed in log space.
double mil_bag_log_likelihood(std::span<const double> pos_scores, std::span<const double> neg_scores);

/// Greedy choice of `k` classifiers (each with unit vote) maximising the bag
/// log-likelihood; votes are [classifier][instance] in {+1, -1}. Throws
/// DegenerateSampling for an empty bag.
std::vector<int> mil_select(const std::vector<std::vector<int>>& pos_votes,
                            const std::vector<std::vector<int>>& neg_votes, int k);

struct MilModel {
  std::vector<WeakClassifier> pool;
  std::vector<int> selected;
  double forgetting = 0.85;
};

MilModel make_mil_model(int pool_size, double forgetting, std::mt19937_64& rng);

/// H(x) = sum of selected votes. Throws NotTrained for an empty selection.
double mil_classify(const MilModel& model, const IntegralImage& ii, const BBox& box);

/// Updates pool statistics from the bags, then re-selects `k` classifiers.
void mil_train_step(MilModel& model, const IntegralImage& ii, const Bag& positive, const Bag& negative,
                    int k);

class MilTracker final : public Tracker {
 public:
  explicit MilTracker(const TrackerConfig& config);
  const MilModel& model() const { return model_; }

 protected:
  void do_init(const Frame& frame, const BBox& roi) override;
  TrackResult do_update(const Frame& frame) override;

 private:
  void train(const Frame& frame, const IntegralImage& ii);

  MilModel model_;
  BBox box_;
  std::uint64_t frame_index_ = 0;
};

}  // namespace rovlock::tracking
