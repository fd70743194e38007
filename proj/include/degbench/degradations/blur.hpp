#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"

namespace degbench {

/// Separable Gaussian, truncated at ceil(3 sigma), reflect padding. Alpha is untouched.
inline ImageBuffer apply_gaussian_blur(const ImageBuffer& img, double sigma) {
  require(sigma >= 0.0 && std::isfinite(sigma), ErrorKind::parameter, "blur sigma must be >= 0");
  if (sigma == 0.0) return img;
  const auto k = gaussian_kernel(sigma);
  return map_color_planes(img, [&](const Plane& p, int) { return convolve_separable(p, k, k); });
}

/// Line kernel of the given length and angle: weight max(0, 1 - distance to
/// the segment between +-(length-1)/2 along the direction), normalized.
inline std::vector<Tap> motion_kernel(double length, double angle) {
  require(length >= 1.0 && std::isfinite(length), ErrorKind::parameter, "motion length must be >= 1");
  const double half = (length - 1.0) / 2.0;
  const double ux = std::cos(angle), uy = std::sin(angle);
  const int r = static_cast<int>(std::ceil(half)) + 1;
  std::vector<Tap> taps;
  double sum = 0.0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const double t = std::clamp(dx * ux + dy * uy, -half, half);
      const double d = std::hypot(dx - t * ux, dy - t * uy);
      const double w = std::max(0.0, 1.0 - d);
      if (w > 0.0) {
        taps.push_back({dx, dy, w});
        sum += w;
      }
    }
  for (Tap& t : taps) t.weight /= sum;
  return taps;
}

inline ImageBuffer apply_motion_blur(const ImageBuffer& img, double length, double angle) {
  const auto taps = motion_kernel(length, angle);
  if (taps.size() == 1) return img;
  return map_color_planes(img, [&](const Plane& p, int) { return convolve_taps(p, taps); });
}

struct TemporalPair {
  ImageBuffer sharp;
  ImageBuffer blurred;
};

/// blurred = per-sample mean of the frames; sharp = the middle frame (index n/2).
inline TemporalPair apply_temporal_average(const std::vector<ImageBuffer>& frames) {
  require(frames.size() >= 2, ErrorKind::parameter, "temporal averaging needs at least two frames");
  for (const auto& f : frames)
    require(f.same_shape(frames.front()), ErrorKind::shape, "temporal frames differ in dimensions");
  std::vector<double> acc(frames.front().size(), 0.0);
  for (const auto& f : frames)
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += f.data()[i];
  ImageBuffer blurred = frames.front();
  auto d = blurred.data();
  const double n = static_cast<double>(frames.size());
  for (std::size_t i = 0; i < acc.size(); ++i) d[i] = ImageBuffer::sanitize(static_cast<float>(acc[i] / n));
  return {frames[frames.size() / 2], std::move(blurred)};
}

}  // namespace degbench
