#include <cmath>
#include <random>

#include "doctest.h"
#include "rovlock/tracking/boosting.hpp"
#include "rovlock/tracking/haar.hpp"
#include "rovlock/tracking/mil.hpp"
#include "support/scenes.hpp"

using namespace rovlock;
using namespace rovlock::tracking;
using namespace rovlock::testing;

namespace {

// Pixel-loop Haar value: each rect rounded to pixels and averaged directly.
double haar_by_pixels(const HaarFeature& f, const RealMap& img, const BBox& box) {
  const int bx0 = static_cast<int>(std::lround(box.x));
  const int by0 = static_cast<int>(std::lround(box.y));
  const int bx1 = std::max(bx0 + 1, static_cast<int>(std::lround(box.x + box.w)));
  const int by1 = std::max(by0 + 1, static_cast<int>(std::lround(box.y + box.h)));
  double acc = 0.0;
  for (const auto& r : f.rects) {
    const double rx = box.x + r.x * box.w, ry = box.y + r.y * box.h;
    int x0 = static_cast<int>(std::lround(rx));
    int y0 = static_cast<int>(std::lround(ry));
    int x1 = std::max(x0 + 1, static_cast<int>(std::lround(rx + r.w * box.w)));
    int y1 = std::max(y0 + 1, static_cast<int>(std::lround(ry + r.h * box.h)));
    if (x1 > bx1) x0 = bx1 - 1, x1 = bx1;
    if (y1 > by1) y0 = by1 - 1, y1 = by1;
    double s = 0.0;
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) s += img(x, y);
    acc += r.weight * s / ((x1 - x0) * (y1 - y0));
  }
  return acc / f.rects.size();
}

WeakClassifier fixed_vote(int vote) {
  WeakClassifier wc(make_haar(HaarKind::TwoRectH, 0, 0, 1, 1));
  // Values are 0 on a constant image; the threshold sits on the side that
  // makes 0 classify as `vote`.
  if (vote > 0)
    wc.set_means(-1.0, 3.0);
  else
    wc.set_means(3.0, -1.0);
  return wc;
}

}  // namespace

TEST_CASE("haar features are zero-mean") {
  const IntegralImage flat(RealMap(40, 30, 0.37));
  for (HaarKind k : {HaarKind::TwoRectH, HaarKind::TwoRectV, HaarKind::ThreeRect, HaarKind::FourRect}) {
    const HaarFeature f = make_haar(k, 0.1, 0.2, 0.7, 0.6);
    double wsum = 0.0;
    for (const auto& r : f.rects) wsum += r.weight;
    CHECK(wsum == 0.0);
    CHECK(std::abs(haar_eval(f, flat, {3, 4, 20, 17})) < 1e-15);
  }
}

TEST_CASE("haar sign and pixel-loop oracle") {
  RealMap half(40, 20);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 40; ++x) half(x, y) = x < 20 ? 0.1 : 0.9;
  CHECK(haar_eval(make_haar(HaarKind::TwoRectH, 0, 0, 1, 1), IntegralImage(half), {0, 0, 40, 20}) > 0.0);

  const RealMap img = random_map(64, 48, 5);
  const IntegralImage ii(img);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> pos(0.0, 20.0), size(8.0, 28.0);
  for (int k = 0; k < 200; ++k) {
    const HaarFeature f = random_haar(rng);
    const BBox box{pos(rng), pos(rng), size(rng), size(rng)};
    CHECK(std::abs(haar_eval(f, ii, box) - haar_by_pixels(f, img, box)) < 1e-9);
  }
  CHECK_THROWS_AS(haar_eval(make_haar(HaarKind::FourRect, 0, 0, 1, 1), ii, {50, 40, 20, 20}), Error);
}

TEST_CASE("adaboost selection") {
  SUBCASE("a perfect classifier wins and the floor keeps alpha finite") {
    const std::vector<int> labels = {1, 1, -1, -1};
    const std::vector<std::vector<int>> votes = {{1, -1, -1, 1}, {1, 1, -1, -1}};
    const auto r = adaboost_select(votes, labels, {0.25, 0.25, 0.25, 0.25}, 1);
    REQUIRE(r.selected.size() == 1);
    CHECK(r.selected[0] == 1);
    CHECK(r.errors[0] == 0.0);
    CHECK(std::isfinite(r.alpha[0]));
    CHECK(r.alpha[0] == doctest::Approx(0.5 * std::log((1 - kErrorFloor) / kErrorFloor)));
  }
  SUBCASE("choice matches the exhaustive weighted error") {
    const std::vector<int> labels = {1, -1, 1};
    const std::vector<double> w = {0.5, 0.3, 0.2};
    const std::vector<std::vector<int>> votes = {{1, 1, -1}, {-1, -1, 1}};
    double e[2] = {0.0, 0.0};
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 3; ++i)
        if (votes[k][i] != labels[i]) e[k] += w[i];
    const int expected = e[0] <= e[1] ? 0 : 1;
    const auto r = adaboost_select(votes, labels, w, 2);
    CHECK(r.selected[0] == expected);
    CHECK(r.errors[0] == doctest::Approx(std::min(e[0], e[1])));
    double total = 0.0;
    for (double v : r.weights) {
      CHECK(v > 0.0);
      total += v;
    }
    CHECK(total == doctest::Approx(1.0));
  }
  SUBCASE("seeded pools agree with brute force on every slot") {
    std::mt19937_64 rng(21);
    std::bernoulli_distribution coin(0.5);
    std::vector<int> labels(12);
    for (int i = 0; i < 12; ++i) labels[i] = i % 3 == 0 ? 1 : -1;
    std::vector<std::vector<int>> votes(9, std::vector<int>(12));
    for (auto& v : votes)
      for (auto& x : v) x = coin(rng) ? 1 : -1;
    std::vector<double> w(12, 1.0 / 12);
    const auto r = adaboost_select(votes, labels, w, 4);
    std::vector<bool> used(9, false);
    for (std::size_t t = 0; t < r.selected.size(); ++t) {
      int best = -1;
      double best_e = 2.0;
      for (int k = 0; k < 9; ++k) {
        if (used[k]) continue;
        double e = 0.0;
        for (int i = 0; i < 12; ++i) e += votes[k][i] != labels[i] ? w[i] : 0.0;
        if (e < best_e) best_e = e, best = k;
      }
      CHECK(r.selected[t] == best);
      used[best] = true;
      const double ec = std::clamp(best_e, 1e-4, 1 - 1e-4);
      const double a = 0.5 * std::log((1 - ec) / ec);
      double s = 0.0;
      for (int i = 0; i < 12; ++i) s += w[i] *= std::exp(-a * labels[i] * votes[best][i]);
      for (double& v : w) v /= s;
    }
  }
  CHECK_THROWS_AS(adaboost_select({{1, 1}}, std::vector<int>{1, 1}, {0.5, 0.5}, 1), Error);
}

TEST_CASE("boost train step and classify") {
  const Frame f = textured_frame(120, 90, 3);
  const IntegralImage ii(vision::to_gray(f));
  std::mt19937_64 rng(1);
  BoostModel model = make_boost_model(40, 0.85, rng);
  CHECK_THROWS_AS(boost_classify(model, ii, {10, 10, 20, 20}), Error);
  const std::vector<LabelledBox> one_label = {{{10, 10, 20, 20}, 1}, {{11, 10, 20, 20}, 1}};
  CHECK_THROWS_AS(boost_train_step(model, ii, one_label, 10, rng), Error);

  const auto samples = boost_samples(ii, {50, 35, 20, 20}, 12.0, rng);
  boost_train_step(model, ii, samples, 10, rng);
  CHECK(model.selected.size() == 10);
  double total = 0.0;
  for (double w : model.sample_weights) total += w;
  CHECK(total == doctest::Approx(1.0));
  for (double a : model.alpha) CHECK(a >= 0.0);

  SUBCASE("hand-built votes") {
    BoostModel m;
    m.pool = {fixed_vote(1), fixed_vote(-1)};
    const IntegralImage flat(RealMap(30, 30, 0.5));
    m.selected = {0};
    m.alpha = {1.0};
    CHECK(boost_classify(m, flat, {2, 2, 10, 10}) == 1.0);
    m.selected = {0, 1};
    m.alpha = {0.5, 0.5};
    CHECK(boost_classify(m, flat, {2, 2, 10, 10}) == 0.0);
  }
  SUBCASE("search argmax matches exhaustive scoring") {
    const BBox prev{50, 35, 20, 20};
    const auto score = [&](const BBox& b) { return boost_classify(model, ii, b); };
    const SearchHit hit = search_argmax(ii, prev, 1.0, 1, score);
    double best = -1e300;
    for (auto [dx, dy] : {std::pair{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}})
      best = std::max(best, score({prev.x + dx, prev.y + dy, prev.w, prev.h}));
    CHECK(hit.score == best);
  }
}

TEST_CASE("mil bag sampling") {
  const Frame f = textured_frame(200, 160, 4);
  const BBox center{90, 70, 20, 20};
  const auto b0 = mil_bag_sample(f, center, 0.0, 8.0, 40.0, 30, 1);
  REQUIRE(b0.positive.instances.size() == 1);
  CHECK(b0.positive.instances[0] == center);

  const auto b4 = mil_bag_sample(f, center, 4.0, 8.0, 40.0, 65, 1);
  int lattice = 0;
  for (int dy = -4; dy <= 4; ++dy)
    for (int dx = -4; dx <= 4; ++dx) lattice += dx * dx + dy * dy <= 16 ? 1 : 0;
  CHECK(static_cast<int>(b4.positive.instances.size()) == lattice);
  CHECK(b4.negative.instances.size() == 65);
  for (const auto& b : b4.negative.instances) {
    CHECK(std::hypot(b.cx() - center.cx(), b.cy() - center.cy()) >= 8.0 - 1e-9);
    CHECK(std::hypot(b.cx() - center.cx(), b.cy() - center.cy()) <= 40.0 + 1e-9);
  }
  CHECK_THROWS_AS(mil_bag_sample(f, center, 8.0, 4.0, 40.0, 10, 1), Error);
  const Frame tiny = textured_frame(24, 24, 4);
  CHECK_THROWS_AS(mil_bag_sample(tiny, {2, 2, 20, 20}, 1.0, 8.0, 12.0, 10, 1), Error);
}

TEST_CASE("noisy-or") {
  CHECK(noisy_or(std::vector<double>{0.5, 0.5}) == doctest::Approx(0.75));
  CHECK(noisy_or(std::vector<double>{0.2, 1.0, 0.3}) == 1.0);
}

TEST_CASE("mil greedy selection") {
  SUBCASE("a separating classifier is chosen first") {
    const std::vector<std::vector<int>> pos = {{-1, -1, 1}, {1, 1, 1}, {1, -1, 1}};
    const std::vector<std::vector<int>> neg = {{-1, -1}, {-1, -1}, {1, 1}};
    CHECK(mil_select(pos, neg, 1) == std::vector<int>{1});
  }
  SUBCASE("matches a brute-force greedy oracle") {
    std::mt19937_64 rng(31);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<std::vector<int>> pos(5, std::vector<int>(6)), neg(5, std::vector<int>(9));
      for (auto* set : {&pos, &neg})
        for (auto& v : *set)
          for (auto& x : v) x = coin(rng) ? 1 : -1;
      const auto got = mil_select(pos, neg, 3);
      std::vector<double> hp(6, 0.0), hn(9, 0.0);
      std::vector<bool> used(5, false);
      for (int step = 0; step < 3; ++step) {
        int best = -1;
        double best_l = -1.0;
        for (int m = 0; m < 5; ++m) {
          if (used[m]) continue;
          double miss = 1.0, keep = 1.0;
          for (int i = 0; i < 6; ++i) miss *= 1.0 - 1.0 / (1.0 + std::exp(-(hp[i] + pos[m][i])));
          for (int i = 0; i < 9; ++i) keep *= 1.0 - 1.0 / (1.0 + std::exp(-(hn[i] + neg[m][i])));
          const double l = (1.0 - miss) * keep;
          if (l > best_l) best_l = l, best = m;
        }
        CHECK(got[step] == best);
        used[best] = true;
        for (int i = 0; i < 6; ++i) hp[i] += pos[best][i];
        for (int i = 0; i < 9; ++i) hn[i] += neg[best][i];
      }
    }
  }
  CHECK_THROWS_AS(mil_select({{}}, {{1}}, 1), Error);
}

TEST_CASE("boosting and mil follow a translating target deterministically") {
  for (TrackerKind kind : {TrackerKind::Boosting, TrackerKind::MIL}) {
    CAPTURE(tracker_name(kind));
    TrackerConfig cfg;
    cfg.seed = 5;
    auto a = create_tracker(kind, cfg);
    auto b = create_tracker(kind, cfg);
    const BBox roi{70, 50, 36, 30};
    a->init(textured_frame(200, 150, 8), roi);
    b->init(textured_frame(200, 150, 8), roi);
    TrackResult ra;
    for (int k = 1; k <= 6; ++k) {
      const Frame f = textured_frame(200, 150, 8, 2.0 * k, -1.0 * k);
      ra = a->update(f);
      const TrackResult rb = b->update(f);
      CHECK(ra.bbox == rb.bbox);
      CHECK(ra.confidence == rb.confidence);
    }
    CHECK(ra.status == TrackStatus::Tracking);
    CHECK(std::abs(ra.bbox.x - (roi.x + 12.0)) <= 2.0);
    CHECK(std::abs(ra.bbox.y - (roi.y - 6.0)) <= 2.0);
  }
}
