#include "rovlock/sim/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "rovlock/vision/sampling.hpp"

namespace rovlock::sim {

std::string_view object_name(SceneObject object) {
  return object == SceneObject::Structure ? "structure" : "ladder";
}

std::string_view object_label(SceneObject object) {
  return object == SceneObject::Structure ? "Structure" : "Ladder";
}

std::optional<SceneObject> parse_object(std::string_view name) {
  if (name == "structure") return SceneObject::Structure;
  if (name == "ladder") return SceneObject::Ladder;
  return std::nullopt;
}

namespace {

constexpr double kMinDepth = 0.2;
constexpr double kWallExtent = 8.0;  // m, half-size of the wall noise lattice
constexpr std::array<double, 3> kWater{0.12, 0.36, 0.42};

RealMap noise_lattice(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealMap m(w, h);
  for (auto& v : m.data()) v = u(rng);
  return m;
}

void fill_rect(RealMap& tex, int x0, int y0, int x1, int y1, double v) {
  for (int y = std::max(0, y0); y < std::min(tex.height(), y1); ++y)
    for (int x = std::max(0, x0); x < std::min(tex.width(), x1); ++x) tex(x, y) = v;
}

void draw_beam(RealMap& tex, double ax, double ay, double bx, double by, double half, double v) {
  const double lx = bx - ax, ly = by - ay;
  const double len2 = lx * lx + ly * ly;
  for (int y = 0; y < tex.height(); ++y)
    for (int x = 0; x < tex.width(); ++x) {
      const double s = std::clamp(((x - ax) * lx + (y - ay) * ly) / len2, 0.0, 1.0);
      const double dx = x - (ax + s * lx), dy = y - (ay + s * ly);
      if (dx * dx + dy * dy <= half * half) tex(x, y) = v;
    }
}

RealMap structure_texture(std::mt19937_64& rng) {
  constexpr int kSide = 180;
  const RealMap blotch = noise_lattice(7, 7, rng);
  RealMap tex(kSide, kSide);
  for (int y = 0; y < kSide; ++y)
    for (int x = 0; x < kSide; ++x)
      tex(x, y) = 0.58 + 0.03 * vision::sample_bilinear(blotch, x * 6.0 / (kSide - 1), y * 6.0 / (kSide - 1));
  constexpr double kBeam = 0.28;
  fill_rect(tex, 0, 0, kSide, 6, kBeam);
  fill_rect(tex, 0, kSide - 6, kSide, kSide, kBeam);
  fill_rect(tex, 0, 0, 6, kSide, kBeam);
  fill_rect(tex, kSide - 6, 0, kSide, kSide, kBeam);
  fill_rect(tex, 66, 0, 72, kSide, kBeam);
  fill_rect(tex, 0, 110, kSide, 116, kBeam);
  draw_beam(tex, 6, 6, 66, 110, 3.0, kBeam);
  draw_beam(tex, 72, 150, 174, 116, 3.0, kBeam);
  return tex;
}

RealMap ladder_texture() {
  constexpr int kW = 120, kH = 240;
  RealMap tex(kW, kH, 0.12);
  constexpr double kBright = 0.88;
  fill_rect(tex, 8, 0, 18, kH, kBright);
  fill_rect(tex, 102, 0, 112, kH, kBright);
  for (int y = 14; y + 8 <= kH; y += 36) fill_rect(tex, 18, y, 102, y + 8, kBright);
  return tex;
}

struct Pose {
  double c = 1.0, s = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;
  explicit Pose(const RovState& rov)
      : c(std::cos(rov.position[3])), s(std::sin(rov.position[3])),
        x(rov.position[0]), y(rov.position[1]), z(rov.position[2]) {}
};

struct Ray {
  double dx, dy, dz;
};

Ray ray_through(const Camera& cam, const Pose& pose, double u, double v) {
  const double xc = (u - cam.cx()) / cam.focal;
  const double yc = -(v - cam.cy()) / cam.focal;
  return {pose.c * xc + pose.s, yc, -pose.s * xc + pose.c};
}

// Target colour where the ray meets the target quad.
std::optional<std::array<double, 3>> shade_target(const Scene& scene, const Pose& pose, const Ray& r) {
  if (r.dz <= 1e-9) return std::nullopt;
  const double t = (scene.target_z - pose.z) / r.dz;
  if (t <= 0.0) return std::nullopt;
  const double wx = pose.x + t * r.dx, wy = pose.y + t * r.dy;
  const double fu = (wx - (scene.target_x - 0.5 * scene.target_w)) / scene.target_w;
  const double fv = ((scene.target_y + 0.5 * scene.target_h) - wy) / scene.target_h;
  if (!(fu >= 0.0 && fu < 1.0 && fv >= 0.0 && fv < 1.0)) return std::nullopt;
  const double g = vision::sample_bilinear(scene.texture, fu * scene.texture.width() - 0.5,
                                           fv * scene.texture.height() - 0.5);
  return std::array<double, 3>{0.8 * g + 0.05, g, 0.95 * g + 0.05};
}

std::array<double, 3> shade_wall(const Scene& scene, const Pose& pose, const Ray& r) {
  if (r.dz <= 1e-9) return kWater;
  const double t = (scene.wall_z - pose.z) / r.dz;
  if (t <= 0.0) return kWater;
  const double wx = pose.x + t * r.dx, wy = pose.y + t * r.dy;
  const double gu = (wx + kWallExtent) / (2.0 * kWallExtent);
  const double gv = (kWallExtent - wy) / (2.0 * kWallExtent);
  const double coarse = vision::sample_bilinear(scene.wall_coarse, gu * (scene.wall_coarse.width() - 1),
                                                gv * (scene.wall_coarse.height() - 1));
  const double fine = vision::sample_bilinear(scene.wall_fine, gu * (scene.wall_fine.width() - 1),
                                              gv * (scene.wall_fine.height() - 1));
  const double lum = std::clamp(0.42 + 0.05 * wy + 0.08 * coarse + 0.04 * fine, 0.0, 1.0);
  return {0.35 * lum, 0.95 * lum, std::min(1.0, 1.05 * lum)};
}

}  // namespace

Scene make_scene(SceneObject object, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 2 + (object == SceneObject::Ladder ? 1 : 0));
  Scene s;
  s.object = object;
  if (object == SceneObject::Structure) {
    s.texture = structure_texture(rng);
    s.target_w = 0.6;
    s.target_h = 0.6;
  } else {
    s.texture = ladder_texture();
    s.target_w = 0.4;
    s.target_h = 0.8;
  }
  s.wall_coarse = noise_lattice(33, 33, rng);   // 0.5 m cells
  s.wall_fine = noise_lattice(161, 161, rng);   // 0.1 m cells
  return s;
}

void VisualNoiseParams::validate() const {
  if (!(bubble_rate >= 0.0) || !(bubble_opacity >= 0.0 && bubble_opacity <= 1.0))
    throw Error(Errc::InvalidConfig, "bubble rate and opacity out of range");
  if (!(bubble_radius_min > 0.0) || bubble_radius_max < bubble_radius_min)
    throw Error(Errc::InvalidConfig, "bubble radius range is empty");
  if (!(occluder_width >= 0.0) || !(occluder_period > 0.0) || !(plume_width >= 0.0) ||
      !(occluder_opacity >= 0.0 && occluder_opacity <= 1.0))
    throw Error(Errc::InvalidConfig, "occluder parameters out of range");
  if (!(turbidity > 0.0 && turbidity <= 1.0))
    throw Error(Errc::InvalidConfig, "turbidity must lie in (0, 1]");
  if (!(fps > 0.0)) throw Error(Errc::InvalidConfig, "noise fps must be positive");
}

Point2 project_point(const Scene& scene, const RovState& rov, double wx, double wy, double wz) {
  const Pose pose(rov);
  const double rx = wx - pose.x, ry = wy - pose.y, rz = wz - pose.z;
  const double xc = pose.c * rx - pose.s * rz;
  const double zc = pose.s * rx + pose.c * rz;
  if (!(zc >= kMinDepth)) throw Error(Errc::TargetNotVisible, "point is behind or too close to the camera");
  return {scene.camera.cx() + scene.camera.focal * xc / zc, scene.camera.cy() - scene.camera.focal * ry / zc};
}

BBox project_target(const Scene& scene, const RovState& rov) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (double sx : {-0.5, 0.5})
    for (double sy : {-0.5, 0.5}) {
      const Point2 p = project_point(scene, rov, scene.target_x + sx * scene.target_w,
                                     scene.target_y + sy * scene.target_h, scene.target_z);
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
  return {x0, y0, x1 - x0, y1 - y0};
}

Rendered render_frame(const Scene& scene, const RovState& rov, const VisualNoiseParams* noise,
                      std::uint64_t seed, double t) {
  const BBox truth = project_target(scene, rov);
  const Pose pose(rov);
  const Camera& cam = scene.camera;
  Frame frame(cam.width, cam.height, 3);
  // Pixel (x, y) covers [x, x + 1) x [y, y + 1). The wall is smooth and
  // shaded once at the pixel centre; the target gets 2x2 samples.
  const int x0 = std::max(0, static_cast<int>(std::floor(truth.x)) - 1);
  const int x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(truth.x + truth.w)) + 1);
  const int y0 = std::max(0, static_cast<int>(std::floor(truth.y)) - 1);
  const int y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(truth.y + truth.h)) + 1);
  for (int y = 0; y < cam.height; ++y)
    for (int x = 0; x < cam.width; ++x) {
      const auto wall = shade_wall(scene, pose, ray_through(cam, pose, x + 0.5, y + 0.5));
      std::array<double, 3> rgb = wall;
      if (x >= x0 && x <= x1 && y >= y0 && y <= y1) {
        rgb = {};
        for (double oy : {0.25, 0.75})
          for (double ox : {0.25, 0.75}) {
            const auto hit = shade_target(scene, pose, ray_through(cam, pose, x + ox, y + oy));
            const auto& c = hit ? *hit : wall;
            for (int k = 0; k < 3; ++k) rgb[k] += 0.25 * c[k];
          }
      }
      for (int k = 0; k < 3; ++k) frame.at(x, y, k) = std::clamp(rgb[k], 0.0, 1.0);
    }
  if (noise != nullptr && noise->active()) frame = apply_visual_disturbance(frame, *noise, seed, t);
  return {vision::quantize8(frame), truth};
}

double occluder_center(const VisualNoiseParams& noise, int width, std::uint64_t seed, double t) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * M_PI)(rng);
  return 0.5 * width + noise.occluder_amplitude * std::sin(2.0 * M_PI * t / noise.occluder_period + phase);
}

namespace {

void blend(Frame& f, int x, int y, const std::array<double, 3>& colour, double alpha) {
  for (int k = 0; k < 3; ++k) f.at(x, y, k) += alpha * (colour[k] - f.at(x, y, k));
}

}  // namespace

Frame apply_visual_disturbance(const Frame& frame, const VisualNoiseParams& noise, std::uint64_t seed,
                               double t) {
  noise.validate();
  if (frame.channels() != 3) throw Error(Errc::InvalidChannelCount, "disturbance overlay expects RGB");
  Frame out = frame;
  const int w = out.width(), h = out.height();

  if (noise.bubble_rate > 0.0) {
    constexpr double kMinRise = 50.0, kMaxRise = 110.0;  // px/s
    constexpr std::array<double, 3> kBubble{0.85, 0.95, 1.0};
    const double interval = 1.0 / (noise.bubble_rate * noise.fps);
    const double lifetime = (h + 2.0 * noise.bubble_radius_max) / kMinRise;
    const auto first = static_cast<long long>(std::floor((t - lifetime) / interval));
    const auto last = static_cast<long long>(std::floor(t / interval));
    for (long long j = first; j <= last; ++j) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(static_cast<std::uint64_t>(j) >> 32)};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double x0 = 0.5 * w + (u(rng) - 0.5) * noise.plume_width;
      const double rise = kMinRise + (kMaxRise - kMinRise) * u(rng);
      const double r = noise.bubble_radius_min + (noise.bubble_radius_max - noise.bubble_radius_min) * u(rng);
      const double wobble = 3.0 * u(rng), phase = 2.0 * M_PI * u(rng);
      const double age = t - j * interval;
      const double by = h + r - rise * age;
      const double bx = x0 + wobble * std::sin(4.0 * M_PI * age + phase);
      if (by < -r) continue;
      for (int y = std::max(0, int(std::floor(by - r - 1))); y <= std::min(h - 1, int(std::ceil(by + r + 1))); ++y)
        for (int x = std::max(0, int(std::floor(bx - r - 1))); x <= std::min(w - 1, int(std::ceil(bx + r + 1))); ++x) {
          const double d = std::hypot(x + 0.5 - bx, y + 0.5 - by);
          const double cover = std::clamp(r + 0.5 - d, 0.0, 1.0);
          if (cover <= 0.0) continue;
          const double rim = std::min(1.0, d / r);
          blend(out, x, y, kBubble, noise.bubble_opacity * cover * (0.55 + 0.45 * rim * rim));
        }
    }
  }

  if (noise.occluder_width > 0.0) {
    constexpr std::array<double, 3> kPole{0.06, 0.08, 0.10};
    const double c = occluder_center(noise, w, seed, t);
    const double half = 0.5 * noise.occluder_width;
    for (int x = std::max(0, int(std::floor(c - half - 1))); x <= std::min(w - 1, int(std::ceil(c + half + 1))); ++x) {
      const double dist = std::abs(x + 0.5 - c);
      const double cover = std::clamp(half + 0.5 - dist, 0.0, 1.0);
      if (cover <= 0.0) continue;
      // Cylinder seen side-on: densest along its axis.
      const double depth = std::sqrt(std::max(0.0, 1.0 - std::pow(std::min(dist / half, 1.0), 2)));
      const double alpha = noise.occluder_opacity * cover * (0.4 + 0.6 * depth);
      for (int y = 0; y < h; ++y) blend(out, x, y, kPole, alpha);
    }
  }

  if (noise.turbidity < 1.0)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int k = 0; k < 3; ++k) out.at(x, y, k) = kWater[k] + noise.turbidity * (out.at(x, y, k) - kWater[k]);
  return out;
}

}  // namespace rovlock::sim
