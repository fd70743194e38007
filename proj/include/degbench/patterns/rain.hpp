#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/seed.hpp"

namespace degbench {

struct RainStreakParams {
  double density = 1.0;      // streaks per 1000 pixels
  double length = 20.0;      // px
  double angle = 1.5707963267948966;  // radians from +x; pi/2 falls straight down
  double width = 1.0;        // px
  double wind_jitter = 0.0;  // [0,1]
  double opacity_lo = 0.25;
  double opacity_hi = 0.7;
};

/// One rendered segment; endpoints are centers of the end caps.
struct Streak {
  double x0, y0, x1, y1;
  double width;
  double opacity;
};

/// Largest angular deviation (radians) at wind_jitter = 1.
inline constexpr double kMaxWindJitter = 0.35;

inline void validate(const RainStreakParams& p) {
  require(p.density >= 0.0 && std::isfinite(p.density), ErrorKind::parameter, "rain density must be >= 0");
  require(p.length >= 1.0, ErrorKind::parameter, "rain streak length must be >= 1");
  require(p.width > 0.0, ErrorKind::parameter, "rain streak width must be positive");
  require(p.wind_jitter >= 0.0 && p.wind_jitter <= 1.0, ErrorKind::parameter, "wind_jitter must lie in [0,1]");
  require(p.opacity_lo >= 0.0 && p.opacity_lo <= p.opacity_hi && p.opacity_hi <= 1.0, ErrorKind::parameter,
          "rain opacity range must satisfy 0 <= lo <= hi <= 1");
}

/// Streak geometry: count ~ Poisson(density * W * H / 1000), centers on pixel
/// centers, direction angle +- wind_jitter * kMaxWindJitter.
inline std::vector<Streak> sample_streaks(const RainStreakParams& p, int width, int height, Rng& rng) {
  validate(p);
  const double lambda = p.density * static_cast<double>(width) * height / 1000.0;
  const std::uint64_t n = lambda > 0 ? rng.poisson(lambda) : 0;
  std::vector<Streak> out;
  out.reserve(static_cast<std::size_t>(n));
  const double half = (p.length - 1.0) / 2.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double cx = static_cast<double>(rng.below(static_cast<std::uint64_t>(width))) + 0.5;
    const double cy = static_cast<double>(rng.below(static_cast<std::uint64_t>(height))) + 0.5;
    const double a = p.angle + p.wind_jitter * kMaxWindJitter * rng.uniform(-1.0, 1.0);
    const double op = rng.uniform(p.opacity_lo, p.opacity_hi);
    out.push_back({cx - half * std::cos(a), cy - half * std::sin(a), cx + half * std::cos(a), cy + half * std::sin(a),
                   p.width, op});
  }
  return out;
}

/// Coverage of a capsule of the given width around segment a-b at point p:
/// 1 inside, linear falloff over one pixel at the rim.
inline double capsule_coverage(double px, double py, const Streak& s) noexcept {
  const double vx = s.x1 - s.x0, vy = s.y1 - s.y0;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((px - s.x0) * vx + (py - s.y0) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double d = std::hypot(px - (s.x0 + t * vx), py - (s.y0 + t * vy));
  return std::clamp(s.width / 2.0 + 0.5 - d, 0.0, 1.0);
}

/// Accumulate streak opacity into an alpha plane with screen (1-(1-a)(1-b)) combination.
inline void render_streaks(Plane& alpha, const std::vector<Streak>& streaks) {
  for (const Streak& s : streaks) {
    const double pad = s.width / 2.0 + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(s.x0, s.x1) - pad)));
    const int x1 = std::min(alpha.width - 1, static_cast<int>(std::ceil(std::max(s.x0, s.x1) + pad)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(s.y0, s.y1) - pad)));
    const int y1 = std::min(alpha.height - 1, static_cast<int>(std::ceil(std::max(s.y0, s.y1) + pad)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double c = capsule_coverage(x + 0.5, y + 0.5, s) * s.opacity;
        if (c <= 0.0) continue;
        float& a = alpha.at(x, y);
        a = static_cast<float>(1.0 - (1.0 - a) * (1.0 - c));
      }
  }
}

/// Alpha plane to an RGBA layer with near-white streak color.
inline ImageBuffer rain_layer_image(const Plane& alpha, float tone = 0.92f) {
  ImageBuffer out(alpha.width, alpha.height, 4);
  for (int y = 0; y < alpha.height; ++y)
    for (int x = 0; x < alpha.width; ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = tone;
      out.at(x, y, 3) = ImageBuffer::sanitize(alpha.at(x, y));
    }
  return out;
}

struct RainLayer {
  ImageBuffer rgba;
  std::vector<Streak> streaks;
};

inline RainLayer gen_rain_streaks(const RainStreakParams& p, int width, int height, std::uint64_t seed) {
  Rng rng(SeedTree(seed, {0xA1A}).key());
  RainLayer layer;
  layer.streaks = sample_streaks(p, width, height, rng);
  Plane alpha(width, height);
  render_streaks(alpha, layer.streaks);
  layer.rgba = rain_layer_image(alpha);
  return layer;
}

}  // namespace degbench
