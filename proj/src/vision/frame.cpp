#include "rovlock/vision/frame.hpp"

#include <algorithm>
#include <cmath>

namespace rovlock {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidChannelCount: return "InvalidChannelCount";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::InvalidSize: return "InvalidSize";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidRoi: return "InvalidRoi";
    case Errc::NotInitialized: return "NotInitialized";
    case Errc::NotTrained: return "NotTrained";
    case Errc::DegenerateSamples: return "DegenerateSamples";
    case Errc::DegenerateSampling: return "DegenerateSampling";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::MissingGroundTruth: return "MissingGroundTruth";
    case Errc::TargetNotVisible: return "TargetNotVisible";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::EmptyLog: return "EmptyLog";
    case Errc::MalformedDataset: return "MalformedDataset";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace rovlock

namespace rovlock::vision {

double intersection_area(const BBox& a, const BBox& b) {
  const double x0 = std::max(a.x, b.x);
  const double y0 = std::max(a.y, b.y);
  const double x1 = std::min(a.x + a.w, b.x + b.w);
  const double y1 = std::min(a.y + a.h, b.y + b.h);
  if (x1 <= x0 || y1 <= y0) return 0.0;
  return (x1 - x0) * (y1 - y0);
}

double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

Frame::Frame(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 1 || height < 1) throw Error(Errc::InvalidSize, "frame must be at least 1x1");
  if (channels != 1 && channels != 3)
    throw Error(Errc::InvalidChannelCount, "frames have 1 or 3 channels");
  data_.assign(static_cast<std::size_t>(width) * height * channels, std::clamp(fill, 0.0, 1.0));
}

Frame Frame::from_data(int width, int height, int channels, std::vector<double> data) {
  Frame f(width, height, channels);
  if (data.size() != f.data_.size())
    throw Error(Errc::SizeMismatch, "data length must equal width*height*channels");
  for (double v : data)
    if (!(v >= 0.0 && v <= 1.0)) throw Error(Errc::OutOfBounds, "intensity outside [0, 1]");
  f.data_ = std::move(data);
  return f;
}

Frame Frame::from_map(const RealMap& map) {
  Frame f(map.width(), map.height(), 1);
  for (std::size_t i = 0; i < map.size(); ++i) f.data_[i] = std::clamp(map[i], 0.0, 1.0);
  return f;
}

RealMap Frame::plane(int c) const {
  if (c < 0 || c >= channels_) throw Error(Errc::InvalidChannelCount, "no such channel");
  RealMap out(width_, height_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = data_[i * channels_ + c];
  return out;
}

RealMap to_gray(const Frame& frame) {
  if (frame.channels() == 1) return frame.plane(0);
  RealMap out(frame.width(), frame.height());
  const auto d = frame.data();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = 0.299 * d[3 * i] + 0.587 * d[3 * i + 1] + 0.114 * d[3 * i + 2];
  return out;
}

Frame to_gray_frame(const Frame& frame) {
  if (frame.channels() == 1) return frame;
  return Frame::from_map(to_gray(frame));
}

Frame quantize8(const Frame& frame) {
  Frame out = frame;
  for (double& v : out.data()) v = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
  return out;
}

}  // namespace rovlock::vision
