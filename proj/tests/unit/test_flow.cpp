#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "rovlock/tracking/medianflow.hpp"
#include "rovlock/tracking/tld.hpp"
#include "support/scenes.hpp"

using namespace rovlock;
using namespace rovlock::tracking;
using namespace rovlock::testing;

namespace {

// Flat grey frame with a textured square pasted at (x, y).
Frame object_frame(int w, int h, int x, int y, int side, std::uint64_t seed) {
  Frame f = Frame::from_map(RealMap(w, h, 0.5));
  for (int j = 0; j < side; ++j)
    for (int i = 0; i < side; ++i)
      if (x + i >= 0 && y + j >= 0 && x + i < w && y + j < h)
        f.at(x + i, y + j) = std::clamp(texture_value(i, j, seed), 0.0, 1.0);
  return f;
}

}  // namespace

TEST_CASE("forward-backward error") {
  const Frame a = textured_frame(80, 60, 1);
  CHECK(fb_error(a, a, {40, 30}) < 1e-9);
  const Frame b = textured_frame(80, 60, 1, 2.0, -1.0);
  CHECK(fb_error(a, b, {40, 30}) <= 0.5);
  const Frame flat = Frame::from_map(RealMap(80, 60, 0.5));
  CHECK(fb_error(flat, flat, {40, 30}) == kFbFailed);
}

TEST_CASE("normalised cross-correlation") {
  const RealMap a = random_map(10, 10, 2);
  CHECK(ncc_patch(a, a) == doctest::Approx(1.0));
  RealMap neg = a;
  for (auto& v : neg.data()) v = 1.0 - v;
  CHECK(ncc_patch(a, neg) == doctest::Approx(-1.0));
  const RealMap b = random_map(10, 10, 3);
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= a.size();
  mb /= b.size();
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += (a[i] - ma) * (b[i] - mb);
    aa += (a[i] - ma) * (a[i] - ma);
    bb += (b[i] - mb) * (b[i] - mb);
  }
  CHECK(std::abs(ncc_patch(a, b) - ab / std::sqrt(aa * bb)) < 1e-9);
  CHECK_THROWS_AS(ncc_patch(a, RealMap(10, 10, 0.2)), Error);
  CHECK_THROWS_AS(ncc_patch(a, RealMap(5, 5, 0.2)), Error);
}

TEST_CASE("grid and filters") {
  const BBox box{10, 20, 30, 40};
  for (const auto& p : flow_grid(box, 10)) {
    CHECK(p.x > box.x);
    CHECK(p.x < box.x + box.w);
    CHECK(p.y > box.y);
    CHECK(p.y < box.y + box.h);
  }
  std::vector<double> fb = {0.3, 5.0, 0.1, 2.0, 0.7, 9.0, 0.2};
  CHECK(keep_best_half(fb).size() == 4);
  CHECK(keep_best_half(fb) == std::vector<std::size_t>{2, 6, 0, 4});
  fb[2] = kFbFailed;
  fb[6] = kFbFailed;
  fb[0] = kFbFailed;
  fb[4] = kFbFailed;
  CHECK(keep_best_half(fb).size() == 3);
}

TEST_CASE("motion estimate") {
  SUBCASE("median is robust to a minority of outliers") {
    std::vector<Point2> from, to;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int i = 0; i < 50; ++i) {
      const Point2 p{u(rng), u(rng)};
      from.push_back(p);
      to.push_back(i < 40 ? Point2{p.x + 3.0, p.y} : Point2{p.x + 50.0, p.y + 50.0});
    }
    const auto m = estimate_motion(from, to);
    CHECK(m.displacement.x == doctest::Approx(3.0));
    CHECK(m.displacement.y == doctest::Approx(0.0));
  }
  SUBCASE("doubled distances give scale 2") {
    std::vector<Point2> from, to;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        from.push_back({10.0 + 3 * i, 20.0 + 4 * j});
        to.push_back({5.0 + 6 * i, 7.0 + 8 * j});
      }
    CHECK(estimate_motion(from, to).scale == doctest::Approx(2.0));
  }
  CHECK_THROWS_AS(estimate_motion({}, {}), Error);
}

TEST_CASE("median flow step") {
  const BBox box{50, 40, 40, 30};
  const RealMap a = vision::to_gray(textured_frame(160, 120, 5));
  const auto still = medianflow_step(a, a, box, MedianFlowParams{});
  CHECK(still.result.status == TrackStatus::Tracking);
  CHECK(std::abs(still.motion.displacement.x) < 1e-6);
  CHECK(std::abs(still.motion.displacement.y) < 1e-6);
  CHECK(still.motion.scale == doctest::Approx(1.0));
  CHECK(still.after_fb == 50);

  SUBCASE("pure translation keeps unit scale") {
    MedianFlowTracker t(TrackerConfig{});
    t.init(textured_frame(160, 120, 5), box);
    for (int k = 1; k <= 50; ++k) {
      const TrackResult r = t.update(textured_frame(160, 120, 5, 0.4 * k, 0.2 * std::sin(0.3 * k)));
      REQUIRE(r.status == TrackStatus::Tracking);
      CHECK(t.last_step().motion.scale == doctest::Approx(1.0).epsilon(0.02));
    }
  }
  SUBCASE("zoom doubles the scale") {
    // A single 2x jump is hard on translation-only LK: require the median of
    // eight scenes and most single pairs within 0.05.
    const BBox centre{60, 40, 40, 40};
    std::vector<double> scales;
    int close = 0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      const RealMap base = vision::to_gray(zoomed_frame(160, 120, seed, 80, 60, 1.0));
      const RealMap z = vision::to_gray(zoomed_frame(160, 120, seed, 80, 60, 2.0));
      const auto step = medianflow_step(base, z, centre, MedianFlowParams{});
      REQUIRE(step.survivors >= 4);
      scales.push_back(step.motion.scale);
      if (std::abs(step.motion.scale - 2.0) <= 0.05) ++close;
    }
    std::sort(scales.begin(), scales.end());
    CHECK(std::abs(0.5 * (scales[3] + scales[4]) - 2.0) <= 0.05);
    CHECK(close >= 6);
  }
  SUBCASE("flat frames are lost") {
    const RealMap flat(160, 120, 0.5);
    CHECK(medianflow_step(flat, flat, box, MedianFlowParams{}).result.lost());
  }
}

TEST_CASE("tld detection") {
  const BBox roi{40, 30, 40, 30};
  const Frame init = textured_frame(160, 120, 1);
  const TldModel model = tld_train_initial(init, roi, TldParams{}, 3);
  REQUIRE(!model.nn_positive.empty());

  SUBCASE("planted copy is found") {
    Frame f = textured_frame(160, 120, 2);
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 40; ++x) f.at(80 + x, 60 + y) = init.at(40 + x, 30 + y);
    bool found = false;
    for (const auto& d : tld_detect(model, f))
      if (vision::iou(d.box, {80, 60, 40, 30}) > 0.99 && d.similarity >= 0.95) found = true;
    CHECK(found);
  }
  SUBCASE("noise gives nothing") {
    CHECK(tld_detect(model, random_frame(160, 120, 9)).empty());
  }
  SUBCASE("untrained model") {
    TldModel empty = model;
    empty.nn_positive.clear();
    CHECK_THROWS_AS(tld_detect(empty, init), Error);
  }
}

TEST_CASE("tld re-acquires after the target vanishes") {
  TldTracker t(TrackerConfig{});
  const Frame with = object_frame(160, 120, 60, 45, 30, 4);
  const Frame without = Frame::from_map(RealMap(160, 120, 0.5));
  t.init(with, {60, 45, 30, 30});
  CHECK(t.update(with).status == TrackStatus::Tracking);
  bool lost = false;
  for (int k = 0; k < 5; ++k) lost = lost || t.update(without).lost();
  CHECK(lost);
  const TrackResult back = t.update(with);
  CHECK(back.status == TrackStatus::Tracking);
  CHECK(vision::iou(back.bbox, {60, 45, 30, 30}) > 0.7);
}

TEST_CASE("tld experts") {
  const BBox roi{40, 30, 30, 30};
  const Frame init = object_frame(160, 120, 40, 30, 30, 6);

  SUBCASE("P-expert adds the track when the detector misses it") {
    TldState s;
    s.model = tld_train_initial(init, roi, TldParams{}, 1);
    for (auto& fern : s.model.ferns) std::fill(fern.positives.begin(), fern.positives.end(), 0u);
    s.box = roi;
    s.has_track = true;
    const std::size_t before = s.model.nn_positive.size();
    const TrackResult r = tld_step(s, init, init);
    CHECK(r.status == TrackStatus::Tracking);
    CHECK(s.last_positive_added == 1);
    CHECK(s.model.nn_positive.size() == before + 1);
    CHECK(s.last_negative_added == 0);
  }
  SUBCASE("N-expert rejects a distant detection") {
    TldState s;
    s.model = tld_train_initial(init, roi, TldParams{}, 1);
    s.box = roi;
    s.has_track = true;
    Frame two = init;
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 30; ++x) two.at(99 + x, 60 + y) = init.at(40 + x, 30 + y);
    const std::size_t before = s.model.nn_negative.size();
    const TrackResult r = tld_step(s, init, two);
    CHECK(r.status == TrackStatus::Tracking);
    CHECK(vision::iou(r.bbox, roi) > 0.7);
    CHECK(s.last_negative_added >= 1);
    CHECK(s.model.nn_negative.size() > before);
    CHECK(s.last_positive_added == 0);
  }
}
