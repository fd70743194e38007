#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/seed.hpp"

namespace degbench {

enum class FlareKind { radial_glow, streak, ring };

inline std::string_view flare_kind_name(FlareKind k) noexcept {
  switch (k) {
    case FlareKind::radial_glow: return "radial_glow";
    case FlareKind::streak: return "streak";
    case FlareKind::ring: return "ring";
  }
  return "radial_glow";
}

inline FlareKind parse_flare_kind(std::string_view s) {
  if (s == "radial_glow") return FlareKind::radial_glow;
  if (s == "streak") return FlareKind::streak;
  if (s == "ring") return FlareKind::ring;
  fail(ErrorKind::format, "unknown flare kind '" + std::string(s) + "'");
}

/// Approximate blackbody tint for a color temperature in kelvin, scaled so the
/// largest channel is 1.
inline std::array<double, 3> kelvin_tint(double kelvin) {
  const double t = std::clamp(kelvin, 1000.0, 40000.0) / 100.0;
  double r, g, b;
  if (t <= 66.0) {
    r = 255.0;
    g = 99.4708025861 * std::log(t) - 161.1195681661;
    b = t <= 19.0 ? 0.0 : 138.5177312231 * std::log(t - 10.0) - 305.0447927307;
  } else {
    r = 329.698727446 * std::pow(t - 60.0, -0.1332047592);
    g = 288.1221695283 * std::pow(t - 60.0, -0.0755148492);
    b = 255.0;
  }
  std::array<double, 3> c{std::clamp(r, 0.0, 255.0), std::clamp(g, 0.0, 255.0), std::clamp(b, 0.0, 255.0)};
  const double m = std::max({c[0], c[1], c[2]});
  for (double& v : c) v /= m;
  return c;
}

/// Square luminous sprite of side `size`, centered. RGB is the tint blended
/// toward white in the hot core; alpha = intensity * normalized luminance.
inline ImageBuffer gen_flare_sprite(FlareKind kind, double intensity, double color_temp, std::uint64_t seed,
                                    int size = 256) {
  require(intensity >= 0.0 && intensity <= 1.0, ErrorKind::parameter, "flare intensity must lie in [0,1]");
  require(size >= 3, ErrorKind::parameter, "flare sprite size must be >= 3");
  constexpr double kPi = 3.14159265358979323846;
  Rng rng(SeedTree(seed, {0xF1A2E}).key());
  const auto tint = kelvin_tint(color_temp);
  const double half = size / 2.0;

  // Shape parameters, all in units of the sprite half-size.
  const double core = rng.uniform(0.03, 0.08);
  const double halo = rng.uniform(0.18, 0.4);
  const int rays = rng.uniform_int(4, 10);
  const double ray_gain = rng.uniform(0.1, 0.3);
  const double ray_phase = rng.uniform(0.0, 2.0 * kPi);
  const double tilt = rng.uniform(-0.3, 0.3);
  const double streak_len = rng.uniform(0.5, 0.95);
  const double streak_thick = rng.uniform(0.01, 0.035);
  const double ring_r = rng.uniform(0.35, 0.7);
  const double ring_w = rng.uniform(0.02, 0.06);

  Plane lum(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double dx = (x + 0.5 - half) / half, dy = (y + 0.5 - half) / half;
      const double r = std::hypot(dx, dy);
      const double glow = std::exp(-(r * r) / (2 * core * core)) + 0.35 * std::exp(-(r * r) / (2 * halo * halo));
      double v = 0.0;
      switch (kind) {
        case FlareKind::radial_glow: {
          // Rays fade with radius faster than the glow so the center stays the maximum.
          const double theta = std::atan2(dy, dx);
          const double ray = std::pow(std::fabs(std::cos(0.5 * rays * theta + ray_phase)), 8.0);
          v = glow * (1.0 + ray_gain * ray * (1.0 - std::exp(-r / core)) * std::exp(-r / halo));
          break;
        }
        case FlareKind::streak: {
          const double u = dx * std::cos(tilt) + dy * std::sin(tilt);
          const double w = -dx * std::sin(tilt) + dy * std::cos(tilt);
          v = glow + 0.8 * std::exp(-(w * w) / (2 * streak_thick * streak_thick)) *
                         std::exp(-std::fabs(u) / (0.35 * streak_len));
          break;
        }
        case FlareKind::ring: {
          const double d = (r - ring_r) / ring_w;
          v = glow + 0.5 * std::exp(-0.5 * d * d);
          break;
        }
      }
      // Fade to zero at the border so sprites composite without a seam.
      v *= std::clamp((1.0 - r) / 0.1, 0.0, 1.0);
      lum.at(x, y) = static_cast<float>(v);
    }
  const float peak = *std::max_element(lum.data.begin(), lum.data.end());

  ImageBuffer out(size, size, 4);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double l = peak > 0 ? lum.at(x, y) / peak : 0.0;
      const double whiten = std::clamp(l * l, 0.0, 1.0);
      for (int c = 0; c < 3; ++c)
        out.at(x, y, c) = static_cast<float>(tint[static_cast<std::size_t>(c)] + (1.0 - tint[static_cast<std::size_t>(c)]) * whiten);
      out.at(x, y, 3) = static_cast<float>(intensity * l);
    }
  out.clamp();
  return out;
}

}  // namespace degbench
