#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "degbench/core/error.hpp"
#include "degbench/core/filter.hpp"
#include "degbench/core/image.hpp"
#include "degbench/core/seed.hpp"
#include "degbench/degradations/photometric.hpp"
#include "degbench/patterns/rain.hpp"

namespace degbench {

struct RainParams {
  RainStreakParams streaks;
  double splash_prob = 0.0;       // per near-field streak
  double perspective_gain = 0.0;  // near-field length/width factor is 1 + gain
  double near_fraction = 0.25;    // near-field streak density relative to far field
  int pattern_id = -1;            // bank pattern to screen in; -1 for none
  double pattern_weight = 0.0;
};

/// The three procedural rain layers, kept apart so they can be measured.
struct RainLayers {
  std::vector<Streak> far;
  std::vector<Streak> near;
  std::vector<Streak> splashes;
  Plane far_alpha;
  Plane near_alpha;  // near streaks and splashes
};

/// Far field from seed.child(0), near field from child(1), splashes from child(2).
inline RainLayers render_rain_layers(const RainParams& p, int width, int height, const SeedTree& seed) {
  require(p.splash_prob >= 0.0 && p.splash_prob <= 1.0, ErrorKind::parameter, "splash_prob must lie in [0,1]");
  require(p.perspective_gain >= 0.0, ErrorKind::parameter, "perspective_gain must be >= 0");
  require(p.near_fraction >= 0.0, ErrorKind::parameter, "near_fraction must be >= 0");
  validate(p.streaks);
  RainLayers L;
  {
    Rng rng = seed.child(0).rng();
    L.far = sample_streaks(p.streaks, width, height, rng);
  }
  const double g = 1.0 + p.perspective_gain;
  RainStreakParams near = p.streaks;
  near.density *= p.near_fraction;
  near.length = p.streaks.length * g;
  near.width *= g;
  near.opacity_lo = std::min(1.0, p.streaks.opacity_lo * (1.0 + 0.5 * p.perspective_gain));
  near.opacity_hi = std::min(1.0, p.streaks.opacity_hi * (1.0 + 0.5 * p.perspective_gain));
  {
    Rng rng = seed.child(1).rng();
    L.near = sample_streaks(near, width, height, rng);
  }
  if (p.splash_prob > 0.0) {
    Rng rng = seed.child(2).rng();
    constexpr double kPi = 3.14159265358979323846;
    for (const Streak& s : L.near) {
      if (!rng.bernoulli(p.splash_prob)) continue;
      // Sputter at the lower end of the streak.
      const bool first_low = s.y0 > s.y1;
      const double ex = first_low ? s.x0 : s.x1, ey = first_low ? s.y0 : s.y1;
      const int drops = rng.uniform_int(3, 7);
      const double spread = (1.5 + s.width) * g;
      for (int k = 0; k < drops; ++k) {
        const double a = rng.uniform(kPi, 2.0 * kPi);  // upward half-plane
        const double r = spread * std::sqrt(rng.uniform());
        const double x = ex + r * std::cos(a), y = ey + r * std::sin(a);
        const double rad = rng.uniform(0.4, 0.9) * std::max(1.0, 0.5 * s.width);
        L.splashes.push_back({x, y, x, y, rad, s.opacity * rng.uniform(0.5, 1.0)});
      }
    }
  }
  L.far_alpha = Plane(width, height);
  render_streaks(L.far_alpha, L.far);
  L.near_alpha = Plane(width, height);
  render_streaks(L.near_alpha, L.near);
  render_streaks(L.near_alpha, L.splashes);
  return L;
}

/// Screen-blend far field, near field (with splashes) and an optional bank
/// pattern over the image. Never darkens a sample.
inline ImageBuffer apply_rain(const ImageBuffer& img, const RainParams& p, const SeedTree& seed,
                              const ImageBuffer* pattern = nullptr) {
  require(p.pattern_weight >= 0.0 && p.pattern_weight <= 1.0, ErrorKind::parameter,
          "rain pattern weight must lie in [0,1]");
  const RainLayers L = render_rain_layers(p, img.width(), img.height(), seed);
  ImageBuffer out = img;
  if (!L.far.empty()) screen_layer(out, rain_layer_image(L.far_alpha), 1.0);
  if (!L.near.empty()) screen_layer(out, rain_layer_image(L.near_alpha), 1.0);
  if (pattern && p.pattern_weight > 0.0) screen_layer(out, *pattern, p.pattern_weight);
  return out;
}

}  // namespace degbench
