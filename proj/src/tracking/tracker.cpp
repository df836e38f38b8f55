#include "rovlock/tracking/tracker.hpp"

#include <string>

#include "rovlock/error.hpp"
#include "rovlock/tracking/boosting.hpp"
#include "rovlock/tracking/csrt.hpp"
#include "rovlock/tracking/kcf.hpp"
#include "rovlock/tracking/medianflow.hpp"
#include "rovlock/tracking/mil.hpp"
#include "rovlock/tracking/mosse.hpp"
#include "rovlock/tracking/tld.hpp"

namespace rovlock::tracking {

namespace {

struct Names {
  TrackerKind kind;
  std::string_view name;
  std::string_view label;
};

constexpr Names kNames[] = {
    {TrackerKind::Boosting, "boosting", "Boosting"},
    {TrackerKind::MIL, "mil", "MIL"},
    {TrackerKind::MedianFlow, "medianflow", "MedianFlow"},
    {TrackerKind::MOSSE, "mosse", "MOSSE"},
    {TrackerKind::TLD, "tld", "TLD"},
    {TrackerKind::KCF, "kcf", "KCF"},
    {TrackerKind::CSRT, "csrt", "CSRT"},
    {TrackerKind::OracleGroundTruth, "oracle", "Oracle"},
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::InvalidConfig, what);
}

bool is_rate(double v) { return v > 0.0 && v <= 1.0; }

}  // namespace

std::string_view tracker_name(TrackerKind kind) {
  for (const auto& n : kNames)
    if (n.kind == kind) return n.name;
  return "unknown";
}

std::string_view tracker_label(TrackerKind kind) {
  for (const auto& n : kNames)
    if (n.kind == kind) return n.label;
  return "Unknown";
}

std::optional<TrackerKind> parse_tracker_kind(std::string_view name) {
  for (const auto& n : kNames)
    if (n.name == name || n.label == name) return n.kind;
  return std::nullopt;
}

void TrackerConfig::validate() const {
  require(boosting.pool_size >= 1 && boosting.selectors >= 1 &&
              boosting.selectors <= boosting.pool_size,
          "boosting needs 1 <= selectors <= pool_size");
  require(boosting.search_radius >= 1.0, "boosting search_radius must be >= 1");
  require(is_rate(boosting.forgetting), "boosting forgetting must be in (0, 1]");
  require(boosting.negative_distance > 0.0, "boosting negative_distance must be positive");

  require(mil.pool_size >= 1 && mil.selected >= 1 && mil.selected <= mil.pool_size,
          "mil needs 1 <= selected <= pool_size");
  require(mil.search_radius >= 1.0, "mil search_radius must be >= 1");
  require(is_rate(mil.forgetting), "mil forgetting must be in (0, 1]");
  require(mil.r_pos >= 0.0 && mil.r_neg_inner > mil.r_pos && mil.r_neg_outer > mil.r_neg_inner,
          "mil radii must satisfy r_pos < r_neg_inner < r_neg_outer");
  require(mil.negatives >= 1, "mil needs at least one negative");

  for (const auto* mf : {&median_flow, &tld.flow}) {
    require(mf->grid >= 2, "median flow grid must be >= 2");
    require(mf->fb_threshold > 0.0, "median flow fb_threshold must be positive");
    require(mf->ncc_window >= 2, "median flow ncc_window must be >= 2");
    require(mf->lk_window >= 3 && mf->lk_levels >= 1, "median flow LK settings out of range");
    require(mf->min_survivors >= 1, "median flow min_survivors must be >= 1");
  }

  require(is_rate(mosse.learning_rate), "mosse learning_rate must be in (0, 1]");
  require(mosse.epsilon >= 0.0, "mosse epsilon must be >= 0");
  require(mosse.psr_resume >= mosse.psr_pause, "mosse psr_resume must be >= psr_pause");
  require(mosse.perturbations >= 0, "mosse perturbations must be >= 0");

  require(kcf.lambda >= 0.0, "kcf lambda must be >= 0");
  require(is_rate(kcf.learning_rate), "kcf learning_rate must be in (0, 1]");
  require(kcf.peak_lost >= 0.0 && kcf.peak_lost < 1.0, "kcf peak_lost must be in [0, 1)");

  require(csrt.lambda > 0.0, "csrt lambda must be positive");
  require(csrt.iterations >= 1, "csrt iterations must be >= 1");
  require(is_rate(csrt.learning_rate), "csrt learning_rate must be in (0, 1]");
  require(is_rate(csrt.reliability_rate), "csrt reliability_rate must be in (0, 1]");
  require(csrt.scale_step >= 0.0 && csrt.scale_step < 0.5, "csrt scale_step must be in [0, 0.5)");

  require(tld.ferns >= 1 && tld.comparisons >= 1 && tld.comparisons <= 20,
          "tld needs ferns >= 1 and 1 <= comparisons <= 20");
  require(tld.nn_threshold > 0.0 && tld.nn_threshold < 1.0, "tld nn_threshold must be in (0, 1)");
  require(tld.scale_base > 1.0 && tld.scale_steps >= 0, "tld scale settings out of range");
  require(tld.stride > 0.0 && tld.stride <= 1.0, "tld stride must be in (0, 1]");
  require(tld.variance_ratio >= 0.0, "tld variance_ratio must be >= 0");
  require(tld.template_size >= 3 && tld.max_templates >= 2, "tld template settings out of range");

  require(patch_size >= 16, "patch_size must be >= 16");
}

Tracker::Tracker(TrackerKind kind, TrackerConfig config) : kind_(kind), config_(std::move(config)) {
  config_.validate();
}

void Tracker::init(const Frame& frame, const BBox& roi) {
  if (!(roi.w >= 8.0 && roi.h >= 8.0))
    throw Error(Errc::InvalidRoi, "RoI must be at least 8x8 pixels");
  if (vision::intersection_area(roi, BBox{0.0, 0.0, static_cast<double>(frame.width()),
                                          static_cast<double>(frame.height())}) <= 0.0)
    throw Error(Errc::InvalidRoi, "RoI lies outside the frame");
  do_init(frame, roi);
  initialized_ = true;
  lost_.reset();
}

TrackResult Tracker::update(const Frame& frame) {
  if (!initialized_) throw Error(Errc::NotInitialized, "update called before init");
  if (lost_) return *lost_;
  TrackResult result = do_update(frame);
  if (result.lost() && !recovers_from_loss()) {
    result.confidence = 0.0;
    lost_ = result;
  }
  return result;
}

std::unique_ptr<Tracker> create_tracker(TrackerKind kind, const TrackerConfig& config) {
  switch (kind) {
    case TrackerKind::Boosting: return std::make_unique<BoostingTracker>(config);
    case TrackerKind::MIL: return std::make_unique<MilTracker>(config);
    case TrackerKind::MedianFlow: return std::make_unique<MedianFlowTracker>(config);
    case TrackerKind::MOSSE: return std::make_unique<MosseTracker>(config);
    case TrackerKind::TLD: return std::make_unique<TldTracker>(config);
    case TrackerKind::KCF: return std::make_unique<KcfTracker>(config);
    case TrackerKind::CSRT: return std::make_unique<CsrtTracker>(config);
    case TrackerKind::OracleGroundTruth: return std::make_unique<OracleTracker>(config);
  }
  throw Error(Errc::InvalidConfig, "unknown tracker kind");
}

OracleTracker::OracleTracker(const TrackerConfig& config)
    : Tracker(TrackerKind::OracleGroundTruth, config) {}

void OracleTracker::do_init(const Frame&, const BBox&) { truth_.reset(); }

TrackResult OracleTracker::do_update(const Frame&) {
  if (!truth_) throw Error(Errc::MissingGroundTruth, "oracle update without a ground-truth box");
  const BBox box = *truth_;
  truth_.reset();
  return {box, 1.0, TrackStatus::Tracking};
}

}  // namespace rovlock::tracking
