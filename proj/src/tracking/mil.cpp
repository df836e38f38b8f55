#include "rovlock/tracking/mil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rovlock::tracking {

namespace {

// log(sigmoid(s)) and log(1 - sigmoid(s)) without overflow.
double log_sigmoid(double s) { return s >= 0.0 ? -std::log1p(std::exp(-s)) : s - std::log1p(std::exp(s)); }
double log_one_minus_sigmoid(double s) { return log_sigmoid(-s); }

bool fits(const Frame& frame, const BBox& b) {
  return b.x >= 0.0 && b.y >= 0.0 && b.x + b.w <= frame.width() && b.y + b.h <= frame.height();
}

}  // namespace

BagPair mil_bag_sample(const Frame& frame, const BBox& center_box, double r_pos, double r_neg_inner,
                       double r_neg_outer, int count, std::uint64_t seed) {
  if (!(r_pos >= 0.0 && r_pos < r_neg_inner && r_neg_inner < r_neg_outer))
    throw Error(Errc::InvalidConfig, "bag radii must satisfy r_pos < r_neg_inner < r_neg_outer");
  BagPair bags;
  bags.positive.label = BagLabel::Positive;
  bags.negative.label = BagLabel::Negative;
  bags.positive.instances.push_back(center_box);
  const int r = static_cast<int>(std::floor(r_pos));
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      if (dx == 0 && dy == 0) continue;
      if (dx * dx + dy * dy > r_pos * r_pos) continue;
      const BBox b{center_box.x + dx, center_box.y + dy, center_box.w, center_box.h};
      if (fits(frame, b)) bags.positive.instances.push_back(b);
    }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> area(r_neg_inner * r_neg_inner, r_neg_outer * r_neg_outer);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int attempt = 0; attempt < 20 * count && static_cast<int>(bags.negative.instances.size()) < count;
       ++attempt) {
    const double rho = std::sqrt(area(rng));
    const double a = angle(rng);
    const BBox b{center_box.x + rho * std::cos(a), center_box.y + rho * std::sin(a), center_box.w,
                 center_box.h};
    if (fits(frame, b)) bags.negative.instances.push_back(b);
  }
  if (bags.negative.instances.empty())
    throw Error(Errc::DegenerateSampling, "no negative sample fits inside the frame");
  return bags;
}

double noisy_or(std::span<const double> probabilities) {
  double keep = 1.0;
  for (double p : probabilities) keep *= 1.0 - p;
  return 1.0 - keep;
}

double mil_bag_log_likelihood(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  // Positive bag: log(1 - prod(1 - p)); negative bag: sum log(1 - p).
  double log_miss = 0.0;
  for (double s : pos_scores) log_miss += log_one_minus_sigmoid(s);
  const double pos = std::log(-std::expm1(log_miss));
  double neg = 0.0;
  for (double s : neg_scores) neg += log_one_minus_sigmoid(s);
  return pos + neg;
}

std::vector<int> mil_select(const std::vector<std::vector<int>>& pos_votes,
                            const std::vector<std::vector<int>>& neg_votes, int k) {
  if (pos_votes.empty() || pos_votes.front().empty() || neg_votes.empty() || neg_votes.front().empty())
    throw Error(Errc::DegenerateSampling, "MIL needs non-empty bags and pool");
  const std::size_t n_pos = pos_votes.front().size();
  const std::size_t n_neg = neg_votes.front().size();
  const int n = std::min<int>(k, static_cast<int>(pos_votes.size()));
  // Scores are integer vote sums, so log(1 - sigmoid(h)) comes from a table.
  std::vector<double> miss(2 * n + 3);
  for (int h = -n - 1; h <= n + 1; ++h) miss[h + n + 1] = log_one_minus_sigmoid(h);
  auto lookup = [&](int h) { return miss[h + n + 1]; };

  std::vector<int> h_pos(n_pos, 0), h_neg(n_neg, 0);
  std::vector<bool> used(pos_votes.size(), false);
  std::vector<int> chosen;
  for (int step = 0; step < n; ++step) {
    int best = -1;
    double best_ll = 0.0;
    for (std::size_t m = 0; m < pos_votes.size(); ++m) {
      if (used[m]) continue;
      double log_miss = 0.0;
      for (std::size_t i = 0; i < n_pos; ++i) log_miss += lookup(h_pos[i] + pos_votes[m][i]);
      double ll = std::log(-std::expm1(log_miss));
      for (std::size_t i = 0; i < n_neg; ++i) ll += lookup(h_neg[i] + neg_votes[m][i]);
      if (best < 0 || ll > best_ll) {
        best = static_cast<int>(m);
        best_ll = ll;
      }
    }
    used[best] = true;
    chosen.push_back(best);
    for (std::size_t i = 0; i < n_pos; ++i) h_pos[i] += pos_votes[best][i];
    for (std::size_t i = 0; i < n_neg; ++i) h_neg[i] += neg_votes[best][i];
  }
  return chosen;
}

MilModel make_mil_model(int pool_size, double forgetting, std::mt19937_64& rng) {
  MilModel model;
  model.forgetting = forgetting;
  model.pool.reserve(pool_size);
  for (int k = 0; k < pool_size; ++k) model.pool.emplace_back(random_haar(rng));
  return model;
}

double mil_classify(const MilModel& model, const IntegralImage& ii, const BBox& box) {
  if (model.selected.empty()) throw Error(Errc::NotTrained, "MIL model has no selected classifiers");
  double h = 0.0;
  for (int k : model.selected) {
    const auto& wc = model.pool[k];
    h += wc.classify(wc.value(ii, box));
  }
  return h;
}

void mil_train_step(MilModel& model, const IntegralImage& ii, const Bag& positive, const Bag& negative,
                    int k) {
  if (positive.instances.empty() || negative.instances.empty())
    throw Error(Errc::DegenerateSampling, "MIL training needs non-empty bags");
  std::vector<std::vector<int>> pos_votes(model.pool.size()), neg_votes(model.pool.size());
  std::vector<double> pos_vals(positive.instances.size()), neg_vals(negative.instances.size());
  for (std::size_t m = 0; m < model.pool.size(); ++m) {
    auto& wc = model.pool[m];
    for (std::size_t i = 0; i < pos_vals.size(); ++i) pos_vals[i] = wc.value(ii, positive.instances[i]);
    for (std::size_t i = 0; i < neg_vals.size(); ++i) neg_vals[i] = wc.value(ii, negative.instances[i]);
    wc.observe(pos_vals, true, model.forgetting);
    wc.observe(neg_vals, false, model.forgetting);
    pos_votes[m].resize(pos_vals.size());
    neg_votes[m].resize(neg_vals.size());
    for (std::size_t i = 0; i < pos_vals.size(); ++i) pos_votes[m][i] = wc.classify(pos_vals[i]);
    for (std::size_t i = 0; i < neg_vals.size(); ++i) neg_votes[m][i] = wc.classify(neg_vals[i]);
  }
  model.selected = mil_select(pos_votes, neg_votes, k);
}

MilTracker::MilTracker(const TrackerConfig& config) : Tracker(TrackerKind::MIL, config) {}

void MilTracker::train(const Frame& frame, const IntegralImage& ii) {
  const auto& p = config().mil;
  const BagPair bags = mil_bag_sample(frame, box_, p.r_pos, p.r_neg_inner, p.r_neg_outer, p.negatives,
                                      config().seed * 1000003ULL + frame_index_);
  mil_train_step(model_, ii, bags.positive, bags.negative, p.selected);
}

void MilTracker::do_init(const Frame& frame, const BBox& roi) {
  const auto& p = config().mil;
  std::mt19937_64 rng(config().seed);
  model_ = make_mil_model(p.pool_size, p.forgetting, rng);
  box_ = roi;
  frame_index_ = 0;
  train(frame, IntegralImage(vision::to_gray(frame)));
}

TrackResult MilTracker::do_update(const Frame& frame) {
  const auto& p = config().mil;
  ++frame_index_;
  const IntegralImage ii(vision::to_gray(frame));
  const SearchHit hit = search_argmax(ii, box_, p.search_radius, 1,
                                      [&](const BBox& b) { return mil_classify(model_, ii, b); });
  const double k = static_cast<double>(model_.selected.size());
  const double confidence = std::clamp(0.5 * (hit.score / k + 1.0), 0.0, 1.0);
  if (!(hit.score > 0.0)) return {box_, confidence, TrackStatus::Lost};
  box_ = hit.box;
  train(frame, ii);
  return {box_, confidence, TrackStatus::Tracking};
}

}  // namespace rovlock::tracking
