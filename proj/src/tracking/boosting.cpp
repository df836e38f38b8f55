#include "rovlock/tracking/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rovlock::tracking {

namespace {

void require_both_labels(std::span<const int> labels) {
  const bool pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool neg = std::find(labels.begin(), labels.end(), -1) != labels.end();
  if (!pos || !neg) throw Error(Errc::DegenerateSamples, "samples need both labels");
}

std::vector<double> balanced_weights(std::span<const int> labels) {
  const auto npos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const auto nneg = static_cast<double>(labels.size()) - npos;
  std::vector<double> w(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) w[i] = labels[i] > 0 ? 0.5 / npos : 0.5 / nneg;
  return w;
}

double weighted_error(const std::vector<int>& votes, std::span<const int> labels,
                      const std::vector<double>& weights) {
  double e = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (votes[i] != labels[i]) e += weights[i];
  return e;
}

}  // namespace

AdaBoostRound adaboost_select(const std::vector<std::vector<int>>& votes, std::span<const int> labels,
                              std::vector<double> weights, int slots) {
  require_both_labels(labels);
  if (weights.size() != labels.size()) throw Error(Errc::SizeMismatch, "one weight per sample");
  AdaBoostRound round;
  std::vector<bool> used(votes.size(), false);
  const int n = std::min<int>(slots, static_cast<int>(votes.size()));
  for (int t = 0; t < n; ++t) {
    int best = -1;
    double best_err = 0.0;
    for (std::size_t k = 0; k < votes.size(); ++k) {
      if (used[k]) continue;
      const double e = weighted_error(votes[k], labels, weights);
      if (best < 0 || e < best_err) {
        best = static_cast<int>(k);
        best_err = e;
      }
    }
    used[best] = true;
    const double e = std::clamp(best_err, kErrorFloor, 1.0 - kErrorFloor);
    const double alpha = 0.5 * std::log((1.0 - e) / e);
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      weights[i] *= std::exp(-alpha * labels[i] * votes[best][i]);
      total += weights[i];
    }
    for (double& w : weights) w /= total;
    round.selected.push_back(best);
    round.alpha.push_back(alpha);
    round.errors.push_back(best_err);
  }
  round.weights = std::move(weights);
  return round;
}

BoostModel make_boost_model(int pool_size, double forgetting, std::mt19937_64& rng) {
  BoostModel model;
  model.forgetting = forgetting;
  model.pool.reserve(pool_size);
  for (int k = 0; k < pool_size; ++k) model.pool.emplace_back(random_haar(rng));
  return model;
}

void boost_train_step(BoostModel& model, const IntegralImage& ii, std::span<const LabelledBox> samples,
                      int selectors, std::mt19937_64& rng) {
  std::vector<int> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) labels.push_back(s.label);
  require_both_labels(labels);

  auto observe = [&](WeakClassifier& wc) {
    std::vector<double> pos, neg;
    for (const auto& s : samples) (s.label > 0 ? pos : neg).push_back(wc.value(ii, s.box));
    wc.observe(pos, true, model.forgetting);
    wc.observe(neg, false, model.forgetting);
  };

  std::vector<std::vector<int>> votes(model.pool.size(), std::vector<int>(samples.size()));
  for (std::size_t k = 0; k < model.pool.size(); ++k) {
    auto& wc = model.pool[k];
    observe(wc);
    for (std::size_t i = 0; i < samples.size(); ++i) votes[k][i] = wc.classify(wc.value(ii, samples[i].box));
  }

  const std::vector<double> initial = balanced_weights(labels);
  AdaBoostRound round = adaboost_select(votes, labels, initial, selectors);
  model.selected = round.selected;
  model.alpha = round.alpha;
  model.sample_weights = round.weights;

  // Worst unselected member gets a fresh feature.
  std::vector<bool> chosen(model.pool.size(), false);
  for (int k : model.selected) chosen[k] = true;
  int worst = -1;
  double worst_err = -1.0;
  for (std::size_t k = 0; k < model.pool.size(); ++k) {
    if (chosen[k]) continue;
    const double e = weighted_error(votes[k], labels, initial);
    if (e > worst_err) {
      worst_err = e;
      worst = static_cast<int>(k);
    }
  }
  if (worst >= 0) {
    model.pool[worst] = WeakClassifier(random_haar(rng));
    observe(model.pool[worst]);
  }
}

double boost_classify(const BoostModel& model, const IntegralImage& ii, const BBox& box) {
  if (model.selected.empty()) throw Error(Errc::NotTrained, "boosting model has no selected classifiers");
  double score = 0.0;
  for (std::size_t t = 0; t < model.selected.size(); ++t) {
    const auto& wc = model.pool[model.selected[t]];
    score += model.alpha[t] * wc.classify(wc.value(ii, box));
  }
  return score;
}

std::vector<LabelledBox> boost_samples(const IntegralImage& ii, const BBox& box, double ring_distance,
                                       std::mt19937_64& rng) {
  std::vector<LabelledBox> out;
  const int shifts[5][2] = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (const auto& s : shifts) {
    const BBox b{box.x + s[0], box.y + s[1], box.w, box.h};
    if (box_inside(ii, b)) out.push_back({b, 1});
  }
  for (int k = 0; k < 8; ++k) {
    const double a = k * std::numbers::pi / 4.0;
    const BBox b{box.x + ring_distance * std::cos(a), box.y + ring_distance * std::sin(a), box.w, box.h};
    if (box_inside(ii, b)) out.push_back({b, -1});
  }
  std::uniform_real_distribution<double> radius(ring_distance, 2.0 * ring_distance);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int k = 0, added = 0; k < 40 && added < 8; ++k) {
    const double r = radius(rng);
    const double a = angle(rng);
    const BBox b{box.x + r * std::cos(a), box.y + r * std::sin(a), box.w, box.h};
    if (!box_inside(ii, b)) continue;
    out.push_back({b, -1});
    ++added;
  }
  return out;
}

BoostingTracker::BoostingTracker(const TrackerConfig& config)
    : Tracker(TrackerKind::Boosting, config) {}

void BoostingTracker::do_init(const Frame& frame, const BBox& roi) {
  const auto& p = config().boosting;
  rng_.seed(config().seed);
  const IntegralImage ii(vision::to_gray(frame));
  box_ = roi;
  model_ = make_boost_model(p.pool_size, p.forgetting, rng_);
  const auto samples = boost_samples(ii, box_, p.negative_distance * std::max(roi.w, roi.h), rng_);
  boost_train_step(model_, ii, samples, p.selectors, rng_);
}

TrackResult BoostingTracker::do_update(const Frame& frame) {
  const auto& p = config().boosting;
  const IntegralImage ii(vision::to_gray(frame));
  const SearchHit hit = search_argmax(ii, box_, p.search_radius, 1,
                                      [&](const BBox& b) { return boost_classify(model_, ii, b); });
  double total = 0.0;
  for (double a : model_.alpha) total += a;
  const double confidence = total > 0.0 ? std::clamp(0.5 * (hit.score / total + 1.0), 0.0, 1.0) : 0.0;
  if (!(hit.score > 0.0)) return {box_, confidence, TrackStatus::Lost};
  box_ = hit.box;
  const auto samples = boost_samples(ii, box_, p.negative_distance * std::max(box_.w, box_.h), rng_);
  boost_train_step(model_, ii, samples, p.selectors, rng_);
  return {box_, confidence, TrackStatus::Tracking};
}

}  // namespace rovlock::tracking
