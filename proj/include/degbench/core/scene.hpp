#pragma once

// Procedural test scenes: smooth backgrounds, saturated anti-aliased shapes,
// striped textures and thin dark strokes. They stand in for natural photos in
// calibration, property tests and demos.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/seed.hpp"
#include "degbench/core/value_noise.hpp"

namespace degbench {

namespace detail {

inline void hsv_to_rgb(double h, double s, double v, double rgb[3]) noexcept {
  h = std::fmod(h, 1.0) * 6.0;
  const int i = static_cast<int>(h);
  const double f = h - i;
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  switch (i % 6) {
    case 0: rgb[0] = v, rgb[1] = t, rgb[2] = p; break;
    case 1: rgb[0] = q, rgb[1] = v, rgb[2] = p; break;
    case 2: rgb[0] = p, rgb[1] = v, rgb[2] = t; break;
    case 3: rgb[0] = p, rgb[1] = q, rgb[2] = v; break;
    case 4: rgb[0] = t, rgb[1] = p, rgb[2] = v; break;
    default: rgb[0] = v, rgb[1] = p, rgb[2] = q; break;
  }
}

}  // namespace detail

/// Deterministic RGB scene for (seed, width, height).
inline ImageBuffer calibration_scene(std::uint64_t seed, int width, int height) {
  Rng rng(SeedTree(seed, {0x5CE7E}).key());
  ImageBuffer img(width, height, 3);
  const double diag = std::hypot(width, height);

  double c0[3], c1[3];
  detail::hsv_to_rgb(rng.uniform(), rng.uniform(0.4, 0.9), rng.uniform(0.45, 0.85), c0);
  detail::hsv_to_rgb(rng.uniform(), rng.uniform(0.4, 0.9), rng.uniform(0.25, 0.7), c1);
  const double ga = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  const double gx = std::cos(ga), gy = std::sin(ga);
  const Plane shade = fractal_noise(width, height, 3, rng);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double t = std::clamp(0.5 + ((x - width / 2.0) * gx + (y - height / 2.0) * gy) / diag, 0.0, 1.0);
      const double m = 0.75 + 0.35 * shade.at(x, y);
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<float>(std::clamp((c0[c] + (c1[c] - c0[c]) * t) * m, 0.0, 1.0));
    }

  const int shapes = rng.uniform_int(14, 22);
  for (int s = 0; s < shapes; ++s) {
    const int kind = static_cast<int>(rng.below(3));
    const double cx = rng.uniform(0.0, width), cy = rng.uniform(0.0, height);
    const double rx = rng.uniform(0.04, 0.18) * width, ry = rng.uniform(0.04, 0.18) * height;
    const double rot = rng.uniform(0.0, 3.14159265358979323846);
    double col[3], col2[3];
    detail::hsv_to_rgb(rng.uniform(), rng.uniform(0.55, 1.0), rng.uniform(0.2, 1.0), col);
    detail::hsv_to_rgb(rng.uniform(), rng.uniform(0.3, 1.0), rng.uniform(0.05, 0.6), col2);
    const bool striped = rng.bernoulli(0.45);
    const double period = rng.uniform(3.0, 12.0);
    const double sa = rng.uniform(0.0, 3.14159265358979323846);
    const double cr = std::cos(rot), sr = std::sin(rot);
    const int x0 = std::max(0, static_cast<int>(cx - std::max(rx, ry) - 2));
    const int x1 = std::min(width - 1, static_cast<int>(cx + std::max(rx, ry) + 2));
    const int y0 = std::max(0, static_cast<int>(cy - std::max(rx, ry) - 2));
    const int y1 = std::min(height - 1, static_cast<int>(cy + std::max(rx, ry) + 2));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
        const double u = dx * cr + dy * sr, v = -dx * sr + dy * cr;
        double sd;  // signed distance in pixels (approximate for ellipses)
        if (kind == 0) {
          const double r = std::hypot(u / rx, v / ry);
          sd = (r - 1.0) * std::min(rx, ry);
        } else if (kind == 1) {
          sd = std::max(std::fabs(u) - rx, std::fabs(v) - ry);
        } else {
          sd = std::max(std::fabs(u) - rx, std::fabs(v) - 0.25 * ry);
        }
        const double cov = std::clamp(0.5 - sd, 0.0, 1.0);
        if (cov <= 0.0) continue;
        double k = 0.0;
        if (striped) k = 0.5 + 0.5 * std::sin(2.0 * 3.14159265358979323846 * (dx * std::cos(sa) + dy * std::sin(sa)) / period);
        for (int c = 0; c < 3; ++c) {
          const double fill = col[c] + (col2[c] - col[c]) * k;
          float& p = img.at(x, y, c);
          p = static_cast<float>(p + (fill - p) * cov);
        }
      }
  }

  const int strokes = rng.uniform_int(3, 7);
  for (int s = 0; s < strokes; ++s) {
    const double ax = rng.uniform(0.0, width), ay = rng.uniform(0.0, height);
    const double bx = rng.uniform(0.0, width), by = rng.uniform(0.0, height);
    const double half = rng.uniform(0.6, 1.6);
    const double shade_v = rng.uniform(0.0, 0.12);
    const double len2 = (bx - ax) * (bx - ax) + (by - ay) * (by - ay);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const double px = x + 0.5, py = y + 0.5;
        double t = len2 > 0 ? ((px - ax) * (bx - ax) + (py - ay) * (by - ay)) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double d = std::hypot(px - (ax + t * (bx - ax)), py - (ay + t * (by - ay)));
        const double cov = std::clamp(half + 0.5 - d, 0.0, 1.0);
        if (cov <= 0.0) continue;
        for (int c = 0; c < 3; ++c) {
          float& p = img.at(x, y, c);
          p = static_cast<float>(p + (shade_v - p) * cov);
        }
      }
  }
  img.clamp();
  return img;
}

/// Companion depth field for a scene: far at the top, near at the bottom,
/// with smooth undulation. Values in [0,1].
inline Plane calibration_depth(std::uint64_t seed, int width, int height) {
  Rng rng(SeedTree(seed, {0xDE97}).key());
  const Plane n = fractal_noise(width, height, 2, rng);
  Plane d(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double ramp = 1.0 - (y + 0.5) / height;
      d.at(x, y) = static_cast<float>(std::clamp(0.15 + 0.65 * ramp + 0.2 * n.at(x, y), 0.0, 1.0));
    }
  return d;
}

}  // namespace degbench
