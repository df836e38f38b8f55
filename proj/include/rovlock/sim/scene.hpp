#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "rovlock/sim/plant.hpp"
#include "rovlock/vision/frame.hpp"

namespace rovlock::sim {

using vision::BBox;
using vision::Frame;
using vision::Point2;
using vision::RealMap;

enum class SceneObject { Structure, Ladder };

std::string_view object_name(SceneObject object);    // "structure", "ladder"
std::string_view object_label(SceneObject object);   // "Structure", "Ladder"
std::optional<SceneObject> parse_object(std::string_view name);

struct Camera {
  int width = 320;
  int height = 240;
  double focal = 300.0;  // px

  double cx() const { return 0.5 * width; }
  double cy() const { return 0.5 * height; }
};

/// Planar target facing the camera at rest, in front of a flat pool wall.
struct Scene {
  SceneObject object = SceneObject::Structure;
  RealMap texture;              // grey levels, row 0 at the top of the target
  double target_w = 0.6;        // m
  double target_h = 0.6;        // m
  double target_x = 0.0;        // m, centre
  double target_y = 0.0;        // m, centre
  double target_z = 2.0;        // m, plane depth
  double wall_z = 3.5;          // m
  RealMap wall_coarse;          // low-frequency wall noise lattice
  RealMap wall_fine;
  Camera camera;
};

/// "structure": thin dark beams on a low-contrast plate. "ladder": bright
/// rails and rungs on a dark backing.
Scene make_scene(SceneObject object, std::uint64_t seed = 0);

struct VisualNoiseParams {
  double bubble_rate = 0.0;        // bubbles per frame
  double bubble_radius_min = 3.0;  // px
  double bubble_radius_max = 9.0;  // px
  double bubble_opacity = 0.6;
  double plume_width = 120.0;      // px, bubbles rise from a band this wide around the centre
  double occluder_width = 0.0;     // px, 0 disables the pole
  double occluder_opacity = 0.5;   // at the pole axis, falling off towards the edges
  double occluder_period = 5.0;    // s
  double occluder_amplitude = 70.0;  // px, sweep half-width about the image centre
  double turbidity = 1.0;          // contrast multiplier in (0, 1]
  double fps = 15.0;               // frame clock used to turn the rate into emission times

  /// Throws InvalidConfig on negative rates, an empty radius range or
  /// turbidity outside (0, 1].
  void validate() const;
  bool active() const { return bubble_rate > 0.0 || occluder_width > 0.0 || turbidity < 1.0; }
};

/// Image coordinates of a world point; throws TargetNotVisible when it sits
/// less than 0.2 m in front of the camera.
Point2 project_point(const Scene& scene, const RovState& rov, double wx, double wy, double wz);

/// Bounding box of the projected target quad.
BBox project_target(const Scene& scene, const RovState& rov);

struct Rendered {
  Frame frame;  // 3 channels, quantised to 8 bits
  BBox truth;
};

Rendered render_frame(const Scene& scene, const RovState& rov, const VisualNoiseParams* noise,
                      std::uint64_t seed, double t);

/// Bubbles, the sweeping pole and turbidity over an existing frame; a pure
/// function of (frame, noise, seed, t).
Frame apply_visual_disturbance(const Frame& frame, const VisualNoiseParams& noise,
                               std::uint64_t seed, double t);

/// Column centre of the pole at time t.
double occluder_center(const VisualNoiseParams& noise, int width, std::uint64_t seed, double t);

}  // namespace rovlock::sim
