#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>

#include "rovlock/vision/frame.hpp"

namespace rovlock::tracking {

using vision::BBox;
using vision::Frame;

enum class TrackerKind { Boosting, MIL, MedianFlow, MOSSE, TLD, KCF, CSRT, OracleGroundTruth };

/// The seven benchmarked algorithms, in report column order.
inline constexpr std::array<TrackerKind, 7> kBenchmarkTrackers = {
    TrackerKind::Boosting, TrackerKind::MIL, TrackerKind::MedianFlow, TrackerKind::MOSSE,
    TrackerKind::TLD,      TrackerKind::KCF, TrackerKind::CSRT};

/// Lowercase CLI name: "boosting", "mil", "medianflow", "mosse", "tld", "kcf", "csrt", "oracle".
std::string_view tracker_name(TrackerKind kind);
/// Display name used in reports ("MedianFlow", "CSRT", ...).
std::string_view tracker_label(TrackerKind kind);
std::optional<TrackerKind> parse_tracker_kind(std::string_view name);

enum class TrackStatus { Tracking, Lost };

struct TrackResult {
  BBox bbox;
  double confidence = 0.0;  // in [0, 1]
  TrackStatus status = TrackStatus::Tracking;

  bool lost() const { return status == TrackStatus::Lost; }
};

// Defaults for every tracker live here so a config file or the CLI can
// override any of them in one place.

struct BoostingParams {
  int pool_size = 250;
  int selectors = 50;
  double search_radius = 25.0;
  double forgetting = 0.85;
  double negative_distance = 0.6;  // fraction of max(w, h)
};

struct MilParams {
  int pool_size = 250;
  int selected = 50;
  double search_radius = 25.0;
  double forgetting = 0.85;
  double r_pos = 4.0;
  double r_neg_inner = 8.0;
  double r_neg_outer = 40.0;
  int negatives = 65;
};

struct MedianFlowParams {
  int grid = 10;
  double fb_threshold = 10.0;  // px
  int ncc_window = 10;
  int lk_window = 11;
  int lk_levels = 3;
  int min_survivors = 4;
};

struct MosseParams {
  double learning_rate = 0.125;
  double psr_pause = 5.7;
  double psr_resume = 8.0;
  double epsilon = 1e-8;
  int perturbations = 8;
};

struct KcfParams {
  double lambda = 1e-4;
  double learning_rate = 0.02;
  double psr_lost = 5.0;
  double peak_lost = 0.5;  // response peak below this is a loss; the label peaks at 1
};

struct CsrtParams {
  double lambda = 0.01;
  int iterations = 4;
  double learning_rate = 0.02;     // filter blending
  double reliability_rate = 0.02;  // channel weight blending
  double scale_step = 0.02;
  double psr_lost = 5.0;
};

struct TldParams {
  int ferns = 10;
  int comparisons = 13;
  double nn_threshold = 0.6;
  double scale_base = 1.2;
  int scale_steps = 5;        // scales base^k for k in [-steps, steps]
  double stride = 0.1;        // of window size
  double variance_ratio = 0.5;
  int template_size = 15;
  int max_templates = 100;
  MedianFlowParams flow{};
};

struct TrackerConfig {
  BoostingParams boosting{};
  MilParams mil{};
  MedianFlowParams median_flow{};
  MosseParams mosse{};
  TldParams tld{};
  KcfParams kcf{};
  CsrtParams csrt{};
  int patch_size = 96;  // longest side of the resampled correlation-filter window
  std::uint64_t seed = 0;

  /// Throws InvalidConfig when a rate leaves (0, 1], a regulariser is
  /// negative, or a size is out of range.
  void validate() const;
};

/// Lifecycle shared by every tracker: init on a single RoI, then one update
/// per frame. Lost is sticky unless the algorithm can recover on its own.
class Tracker {
 public:
  Tracker(TrackerKind kind, TrackerConfig config);
  virtual ~Tracker() = default;
  Tracker(const Tracker&) = delete;
  Tracker& operator=(const Tracker&) = delete;

  TrackerKind kind() const { return kind_; }
  const TrackerConfig& config() const { return config_; }
  bool initialized() const { return initialized_; }

  /// Throws InvalidRoi for a box smaller than 8x8 or outside the frame.
  /// Calling it again re-seeds the tracker.
  void init(const Frame& frame, const BBox& roi);

  /// Throws NotInitialized before init.
  TrackResult update(const Frame& frame);

  /// Ground truth for the upcoming update. Only the oracle consumes it.
  virtual void supply_ground_truth(const BBox&) {}

 protected:
  virtual void do_init(const Frame& frame, const BBox& roi) = 0;
  virtual TrackResult do_update(const Frame& frame) = 0;
  /// Whether update keeps running after a Lost result.
  virtual bool recovers_from_loss() const { return false; }

 private:
  TrackerKind kind_;
  TrackerConfig config_;
  bool initialized_ = false;
  std::optional<TrackResult> lost_;
};

/// Throws InvalidConfig when `config` fails validation.
std::unique_ptr<Tracker> create_tracker(TrackerKind kind, const TrackerConfig& config = {});

/// Returns the supplied ground-truth box with confidence 1. Update without a
/// fresh ground-truth box throws MissingGroundTruth.
class OracleTracker final : public Tracker {
 public:
  explicit OracleTracker(const TrackerConfig& config);
  void supply_ground_truth(const BBox& box) override { truth_ = box; }

 protected:
  void do_init(const Frame& frame, const BBox& roi) override;
  TrackResult do_update(const Frame& frame) override;

 private:
  std::optional<BBox> truth_;
};

}  // namespace rovlock::tracking
