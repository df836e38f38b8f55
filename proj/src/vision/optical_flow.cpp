#include "rovlock/vision/optical_flow.hpp"

#include <algorithm>
#include <cmath>

#include "rovlock/vision/sampling.hpp"

namespace rovlock::vision {

ImagePyramid::ImagePyramid(const RealMap& gray, int levels) {
  if (levels < 1) throw Error(Errc::InvalidSize, "pyramid needs at least one level");
  images_.push_back(gray);
  for (int l = 1; l < levels; ++l) {
    const RealMap& last = images_.back();
    if (last.width() < 16 || last.height() < 16) break;
    images_.push_back(pyr_down(last));
  }
  for (const auto& img : images_) {
    gx_.push_back(gradient_x(img));
    gy_.push_back(gradient_y(img));
  }
}

namespace {

PointTrackOutcome track_one(const ImagePyramid& prev, const ImagePyramid& next, Point2 p,
                            const LkParams& params) {
  PointTrackOutcome out{p, p, PointStatus::Diverged, 0.0};
  const int half = params.window / 2;
  const int n = params.window * params.window;
  const int top = std::min(prev.levels(), next.levels()) - 1;

  std::vector<double> tmpl(n), gx(n), gy(n);
  double guess_x = 0.0;
  double guess_y = 0.0;

  for (int level = top; level >= 0; --level) {
    const double scale = 1.0 / static_cast<double>(1 << level);
    const double px = p.x * scale;
    const double py = p.y * scale;
    const RealMap& img0 = prev.image(level);
    const RealMap& img1 = next.image(level);

    double a = 0.0, b = 0.0, c = 0.0;
    for (int j = -half, k = 0; j <= half; ++j)
      for (int i = -half; i <= half; ++i, ++k) {
        tmpl[k] = sample_bilinear(img0, px + i, py + j);
        gx[k] = sample_bilinear(prev.grad_x(level), px + i, py + j);
        gy[k] = sample_bilinear(prev.grad_y(level), px + i, py + j);
        a += gx[k] * gx[k];
        b += gx[k] * gy[k];
        c += gy[k] * gy[k];
      }
    const double an = a / n, bn = b / n, cn = c / n;
    const double min_eig = 0.5 * (an + cn) - std::sqrt(0.25 * (an - cn) * (an - cn) + bn * bn);
    const double det = a * c - b * b;
    if (!(min_eig >= params.min_eigen) || det <= 0.0) {
      if (level == 0) return out;
      guess_x *= 2.0;
      guess_y *= 2.0;
      continue;
    }

    double vx = 0.0, vy = 0.0;
    for (int it = 0; it < params.max_iterations; ++it) {
      const double qx = px + guess_x + vx;
      const double qy = py + guess_y + vy;
      if (qx < -half || qy < -half || qx > img1.width() - 1 + half ||
          qy > img1.height() - 1 + half) {
        out.status = PointStatus::OutOfBounds;
        out.displaced = {qx / scale, qy / scale};
        return out;
      }
      double bx = 0.0, by = 0.0;
      for (int j = -half, k = 0; j <= half; ++j)
        for (int i = -half; i <= half; ++i, ++k) {
          const double diff = tmpl[k] - sample_bilinear(img1, qx + i, qy + j);
          bx += diff * gx[k];
          by += diff * gy[k];
        }
      const double dx = (c * bx - b * by) / det;
      const double dy = (a * by - b * bx) / det;
      vx += dx;
      vy += dy;
      if (dx * dx + dy * dy < params.epsilon * params.epsilon) break;
    }
    if (level > 0) {
      guess_x = 2.0 * (guess_x + vx);
      guess_y = 2.0 * (guess_y + vy);
      continue;
    }

    out.displaced = {p.x + guess_x + vx, p.y + guess_y + vy};
    if (!std::isfinite(out.displaced.x) || !std::isfinite(out.displaced.y)) return out;
    double ssd = 0.0;
    for (int j = -half, k = 0; j <= half; ++j)
      for (int i = -half; i <= half; ++i, ++k) {
        const double diff = tmpl[k] - sample_bilinear(img1, out.displaced.x + i, out.displaced.y + j);
        ssd += diff * diff;
      }
    out.residual = ssd / n;
    const bool inside = out.displaced.x >= 0.0 && out.displaced.y >= 0.0 &&
                        out.displaced.x <= img1.width() - 1 && out.displaced.y <= img1.height() - 1;
    out.status = inside ? PointStatus::Ok : PointStatus::OutOfBounds;
  }
  return out;
}

}  // namespace

std::vector<PointTrackOutcome> lk_track_points(const ImagePyramid& prev, const ImagePyramid& next,
                                               std::span<const Point2> points,
                                               const LkParams& params) {
  if (params.window < 5 || params.window % 2 == 0)
    throw Error(Errc::InvalidSize, "LK window must be odd and >= 5");
  std::vector<PointTrackOutcome> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(track_one(prev, next, p, params));
  return out;
}

std::vector<PointTrackOutcome> lk_track_points(const Frame& prev, const Frame& next,
                                               std::span<const Point2> points, int window,
                                               int levels) {
  if (prev.width() != next.width() || prev.height() != next.height())
    throw Error(Errc::SizeMismatch, "LK frames differ in size");
  if (points.empty()) return {};
  if (levels < 1) throw Error(Errc::InvalidSize, "LK needs at least one level");
  LkParams params;
  params.window = window;
  params.levels = levels;
  const ImagePyramid p0(to_gray(prev), levels);
  const ImagePyramid p1(to_gray(next), levels);
  return lk_track_points(p0, p1, points, params);
}

}  // namespace rovlock::vision
